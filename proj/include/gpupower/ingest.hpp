#pragma once

/// @file ingest.hpp
/// @brief Readers for telemetry, scheduler and allocation files, and the
/// 15-second windowed mean aggregation.
///
/// Telemetry:   timestamp,node_id,input_power_w,cpu_power_w,gcd0_w,...,gcd7_w
/// Scheduler:   job_id,project_id,num_nodes,begin_time,end_time
/// Allocations: job_id,node_id
///
/// Timestamps may be integer epoch seconds or ISO-8601 `Z` strings; writers
/// always emit epoch seconds.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gpupower::ingest {

inline constexpr std::string_view kTelemetryHeader =
    "timestamp,node_id,input_power_w,cpu_power_w,gcd0_w,gcd1_w,gcd2_w,gcd3_w,gcd4_w,gcd5_w,gcd6_w,gcd7_w";
inline constexpr std::string_view kSchedulerHeader = "job_id,project_id,num_nodes,begin_time,end_time";
inline constexpr std::string_view kAllocationHeader = "job_id,node_id";
inline constexpr std::size_t kTelemetryColumns = 4 + kGcdsPerNode;

struct ParseOptions {
  /// Skip malformed rows (counting them) instead of aborting.
  bool lenient = false;
};

template <typename Row>
struct Parsed {
  std::vector<Row> rows;
  std::size_t skipped = 0;
  std::vector<Warning> warnings;
};

namespace detail {

template <typename Row, typename RowFn>
Parsed<Row> parse_rows(std::istream& in, std::string_view header, const ParseOptions& opts, RowFn&& parse_row) {
  delimited::LineReader reader(in);
  delimited::expect_header(reader, header);
  Parsed<Row> out;
  std::string line;
  while (reader.next(line)) {
    try {
      out.rows.push_back(parse_row(delimited::split(line), reader.line_no()));
    } catch (const ParseError& e) {
      if (!opts.lenient) throw;
      ++out.skipped;
      out.warnings.push_back({Warning::Kind::SkippedRow, e.what()});
    }
  }
  return out;
}

inline void expect_columns(const std::vector<std::string_view>& f, std::size_t n, std::size_t line) {
  if (f.size() != n) {
    throw ParseError(line, "expected " + std::to_string(n) + " columns, got " + std::to_string(f.size()));
  }
}

inline double parse_watts(std::string_view field, std::string_view column, std::size_t line) {
  const auto v = delimited::parse_double(field);
  if (!v || !std::isfinite(*v) || *v < 0.0) {
    throw ParseError(line, std::string(column) + ": '" + std::string(field) + "' is not a finite non-negative number");
  }
  return *v;
}

inline std::int64_t parse_time(std::string_view field, std::string_view column, std::size_t line) {
  const auto t = delimited::parse_timestamp(field);
  if (!t) throw ParseError(line, std::string(column) + ": bad timestamp '" + std::string(field) + "'");
  return *t;
}

}  // namespace detail

/// One PowerSample per well-formed row, in file order.
inline Parsed<PowerSample> parse_telemetry(std::istream& in, const ParseOptions& opts = {}) {
  return detail::parse_rows<PowerSample>(in, kTelemetryHeader, opts, [](const auto& f, std::size_t line) {
    detail::expect_columns(f, kTelemetryColumns, line);
    PowerSample s;
    s.timestamp = detail::parse_time(f[0], "timestamp", line);
    if (f[1].empty()) throw ParseError(line, "node_id is empty");
    s.node_id = std::string(f[1]);
    s.input_power = detail::parse_watts(f[2], "input_power_w", line);
    s.cpu_power = detail::parse_watts(f[3], "cpu_power_w", line);
    for (std::size_t g = 0; g < kGcdsPerNode; ++g) {
      s.gcd_power[g] = detail::parse_watts(f[4 + g], "gcd" + std::to_string(g) + "_w", line);
    }
    try {
      validate_sample(s);
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
    return s;
  });
}

/// Arithmetic mean per (node, 15-s window). Output sorted by (node_id, timestamp).
inline std::vector<AggregatedSample> aggregate_15s(const std::vector<PowerSample>& samples) {
  struct Acc {
    double input = 0.0, cpu = 0.0;
    std::array<double, kGcdsPerNode> gcd{};
    std::size_t n = 0;
  };
  std::map<std::pair<std::string, std::int64_t>, Acc> windows;
  for (const auto& s : samples) {
    validate_sample(s);
    auto& acc = windows[{s.node_id, window_start(s.timestamp)}];
    acc.input += s.input_power;
    acc.cpu += s.cpu_power;
    for (std::size_t g = 0; g < kGcdsPerNode; ++g) acc.gcd[g] += s.gcd_power[g];
    ++acc.n;
  }
  std::vector<AggregatedSample> out;
  out.reserve(windows.size());
  for (const auto& [key, acc] : windows) {
    AggregatedSample a;
    a.node_id = key.first;
    a.timestamp = key.second;
    const double n = static_cast<double>(acc.n);
    a.input_power = acc.input / n;
    a.cpu_power = acc.cpu / n;
    for (std::size_t g = 0; g < kGcdsPerNode; ++g) a.gcd_power[g] = acc.gcd[g] / n;
    a.contributing = acc.n;
    out.push_back(std::move(a));
  }
  return out;
}

/// Reads an already-aggregated telemetry file (same columns, aligned timestamps).
inline std::vector<AggregatedSample> parse_aggregated(std::istream& in, const ParseOptions& opts = {}) {
  auto parsed = parse_telemetry(in, opts);
  std::vector<AggregatedSample> out;
  out.reserve(parsed.rows.size());
  for (auto& s : parsed.rows) {
    if (s.timestamp % kWindowSeconds != 0) {
      throw ParseError(0, "timestamp " + std::to_string(s.timestamp) + " is not aligned to a 15-second window");
    }
    AggregatedSample a;
    static_cast<PowerSample&>(a) = std::move(s);
    a.contributing = 1;
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.node_id, x.timestamp) < std::tie(y.node_id, y.timestamp);
  });
  return out;
}

template <typename Sample>
void write_telemetry(std::ostream& out, const std::vector<Sample>& samples) {
  out << kTelemetryHeader << '\n';
  for (const auto& s : samples) {
    out << s.timestamp << ',' << s.node_id << ',' << delimited::format_exact(s.input_power) << ','
        << delimited::format_exact(s.cpu_power);
    for (double w : s.gcd_power) out << ',' << delimited::format_exact(w);
    out << '\n';
  }
}

/// Scheduler rows. `node_ids` stay empty until join_allocations; the science
/// domain is filled in by the job join stage.
inline Parsed<JobRecord> parse_scheduler(std::istream& in, const ParseOptions& opts = {}) {
  return detail::parse_rows<JobRecord>(in, kSchedulerHeader, opts, [](const auto& f, std::size_t line) {
    detail::expect_columns(f, 5, line);
    JobRecord j;
    j.job_id = std::string(f[0]);
    j.project_id = std::string(f[1]);
    if (j.job_id.empty()) throw ParseError(line, "job_id is empty");
    if (j.project_id.empty()) throw ParseError(line, "project_id is empty");
    const auto n = delimited::parse_int(f[2]);
    if (!n || *n <= 0) throw ParseError(line, "num_nodes must be a positive integer");
    j.num_nodes = static_cast<std::size_t>(*n);
    j.begin_time = detail::parse_time(f[3], "begin_time", line);
    j.end_time = detail::parse_time(f[4], "end_time", line);
    if (j.begin_time >= j.end_time) throw ParseError(line, "job " + j.job_id + " has begin_time >= end_time");
    return j;
  });
}

inline Parsed<AllocationRow> parse_allocations(std::istream& in, const ParseOptions& opts = {}) {
  return detail::parse_rows<AllocationRow>(in, kAllocationHeader, opts, [](const auto& f, std::size_t line) {
    detail::expect_columns(f, 2, line);
    if (f[0].empty() || f[1].empty()) throw ParseError(line, "job_id and node_id must be non-empty");
    return AllocationRow{std::string(f[0]), std::string(f[1])};
  });
}

/// Fills JobRecord::node_ids from allocation rows. Allocation rows naming an
/// unknown job are reported as DanglingAllocation warnings, never fatal.
/// When allocations exist for a job, num_nodes is reset to their count.
inline std::vector<Warning> join_allocations(std::vector<JobRecord>& jobs, const std::vector<AllocationRow>& allocs) {
  std::vector<Warning> warnings;
  std::unordered_map<std::string, JobRecord*> by_id;
  for (auto& j : jobs) by_id.emplace(j.job_id, &j);
  std::map<std::string, std::size_t> dangling;
  for (const auto& a : allocs) {
    auto it = by_id.find(a.job_id);
    if (it == by_id.end()) {
      ++dangling[a.job_id];
      continue;
    }
    it->second->node_ids.insert(a.node_id);
  }
  for (const auto& [job, count] : dangling) {
    warnings.push_back({Warning::Kind::DanglingAllocation,
                        std::to_string(count) + " allocation row(s) reference unknown job '" + job + "'"});
  }
  for (auto& j : jobs) {
    if (j.node_ids.empty()) {
      warnings.push_back({Warning::Kind::JobWithoutNodes, "job '" + j.job_id + "' has no allocation rows"});
      continue;
    }
    if (j.node_ids.size() != j.num_nodes) {
      warnings.push_back({Warning::Kind::NodeCountMismatch, "job '" + j.job_id + "' declares " +
                                                                std::to_string(j.num_nodes) + " nodes but has " +
                                                                std::to_string(j.node_ids.size()) + " allocations"});
      j.num_nodes = j.node_ids.size();
    }
  }
  return warnings;
}

inline void write_scheduler(std::ostream& out, const std::vector<JobRecord>& jobs) {
  out << kSchedulerHeader << '\n';
  for (const auto& j : jobs) {
    out << j.job_id << ',' << j.project_id << ',' << j.num_nodes << ',' << j.begin_time << ',' << j.end_time << '\n';
  }
}

inline void write_allocations(std::ostream& out, const std::vector<AllocationRow>& rows) {
  out << kAllocationHeader << '\n';
  for (const auto& r : rows) out << r.job_id << ',' << r.node_id << '\n';
}

}  // namespace gpupower::ingest
