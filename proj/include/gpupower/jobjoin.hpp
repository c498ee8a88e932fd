#pragma once

/// @file jobjoin.hpp
/// @brief Attribution of aggregated node samples to scheduler jobs, plus
/// per-job energy and GPU-hour integration.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gpupower {

/// Pseudo-job collecting samples from nodes no job occupied.
inline constexpr std::string_view kIdleJobId = "IDLE";

/// Longest leading run of letters, uppercased ("ast137" -> "AST").
inline std::string derive_domain(std::string_view project_id) {
  if (project_id.empty()) throw Error(ErrorKind::EmptyProjectId, "project_id is empty");
  std::string out;
  for (char c : project_id) {
    if (!std::isalpha(static_cast<unsigned char>(c))) break;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (out.empty()) {
    throw Error(ErrorKind::EmptyProjectId, "project_id '" + std::string(project_id) + "' has no alphabetic prefix");
  }
  return out;
}

inline JobSizeClass classify_job_size(std::size_t num_nodes) {
  for (auto c : kAllSizeClasses) {
    const auto r = node_range(c);
    if (r.lo <= num_nodes && num_nodes <= r.hi) return c;
  }
  throw Error(ErrorKind::OutOfRange, "num_nodes " + std::to_string(num_nodes) + " outside 1-9408");
}

/// Checks the JobRecord invariants, deriving science_domain when it is empty.
inline void prepare_job(JobRecord& job) {
  if (job.begin_time >= job.end_time) {
    throw Error(ErrorKind::Validation, "job '" + job.job_id + "' has begin_time >= end_time");
  }
  const auto domain = derive_domain(job.project_id);
  if (job.science_domain.empty()) {
    job.science_domain = domain;
  } else if (job.science_domain != domain) {
    throw Error(ErrorKind::Validation, "job '" + job.job_id + "' science_domain does not match project_id prefix");
  }
  classify_job_size(job.num_nodes);
}

struct TimedWatts {
  std::int64_t timestamp;
  double watts;
};

struct GcdKey {
  std::string node_id;
  std::size_t gcd = 0;
  friend auto operator<=>(const GcdKey&, const GcdKey&) = default;
};

/// One 15-s series per (node, GCD) for a single job.
struct JobPowerSeries {
  std::string job_id;
  std::map<GcdKey, std::vector<TimedWatts>> series;

  std::size_t sample_count() const {
    std::size_t n = 0;
    for (const auto& [_, s] : series) n += s.size();
    return n;
  }
};

struct JoinResult {
  /// Keyed by job_id; includes an IDLE entry when any sample was unattributed.
  std::map<std::string, JobPowerSeries> jobs;
  std::vector<Warning> warnings;
};

/// Attaches sample (t, n) to job j iff n is allocated to j and
/// begin(j) <= t < end(j). When several jobs claim the same node-window the
/// earliest begin_time wins (ties by job_id) and an OverlappingJobs warning is
/// recorded per job pair.
template <typename Sample>
JoinResult join(const std::vector<Sample>& samples, const std::vector<JobRecord>& jobs) {
  std::unordered_map<std::string, std::vector<const JobRecord*>> by_node;
  JoinResult out;
  for (const auto& j : jobs) {
    out.jobs[j.job_id].job_id = j.job_id;
    for (const auto& n : j.node_ids) by_node[n].push_back(&j);
  }
  for (auto& [_, list] : by_node) {
    std::sort(list.begin(), list.end(), [](const JobRecord* a, const JobRecord* b) {
      return std::tie(a->begin_time, a->job_id) < std::tie(b->begin_time, b->job_id);
    });
  }

  std::map<std::pair<std::string, std::string>, std::size_t> overlaps;
  for (const auto& s : samples) {
    const JobRecord* owner = nullptr;
    if (auto it = by_node.find(s.node_id); it != by_node.end()) {
      for (const JobRecord* j : it->second) {
        if (!j->contains(s.timestamp)) continue;
        if (!owner) {
          owner = j;
        } else {
          ++overlaps[{owner->job_id, j->job_id}];
        }
      }
    }
    const std::string job_id = owner ? owner->job_id : std::string(kIdleJobId);
    auto& js = out.jobs[job_id];
    js.job_id = job_id;
    for (std::size_t g = 0; g < s.gcd_power.size(); ++g) {
      js.series[GcdKey{s.node_id, g}].push_back({s.timestamp, s.gcd_power[g]});
    }
  }
  for (auto& [_, js] : out.jobs) {
    for (auto& [key, series] : js.series) {
      std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    }
  }
  for (const auto& [pair, count] : overlaps) {
    out.warnings.push_back({Warning::Kind::OverlappingJobs, "jobs '" + pair.first + "' and '" + pair.second +
                                                                "' both claim " + std::to_string(count) +
                                                                " node-window(s); '" + pair.first + "' kept them"});
  }
  return out;
}

/// Rectangle rule at the nominal 15-s step, in MWh.
inline double integrate_energy(const std::vector<TimedWatts>& series) {
  double joules = 0.0;
  for (const auto& p : series) joules += p.watts * static_cast<double>(kWindowSeconds);
  return joules / kJoulesPerMwh;
}

inline double integrate_energy(const JobPowerSeries& job) {
  double mwh = 0.0;
  for (const auto& [_, s] : job.series) mwh += integrate_energy(s);
  return mwh;
}

inline double gpu_hours(std::size_t sample_count) {
  return static_cast<double>(sample_count) * static_cast<double>(kWindowSeconds) / 3600.0;
}

inline double gpu_hours(const std::vector<TimedWatts>& series) { return gpu_hours(series.size()); }
inline double gpu_hours(const JobPowerSeries& job) { return gpu_hours(job.sample_count()); }

struct JobEnergySummary {
  std::string job_id;
  std::string science_domain;
  std::optional<JobSizeClass> job_size_class;  // empty for IDLE
  double gpu_energy_mwh = 0.0;
  double gpu_hours = 0.0;
  std::size_t sample_count = 0;
};

/// Per-job summary rows in job_id order; IDLE is reported with domain IDLE
/// and no size class.
inline std::vector<JobEnergySummary> summarize(const JoinResult& joined, const std::vector<JobRecord>& jobs) {
  std::unordered_map<std::string, const JobRecord*> by_id;
  for (const auto& j : jobs) by_id.emplace(j.job_id, &j);
  std::vector<JobEnergySummary> out;
  for (const auto& [id, js] : joined.jobs) {
    JobEnergySummary s;
    s.job_id = id;
    if (auto it = by_id.find(id); it != by_id.end()) {
      s.science_domain = it->second->science_domain.empty() ? derive_domain(it->second->project_id)
                                                            : it->second->science_domain;
      s.job_size_class = classify_job_size(it->second->num_nodes);
    } else {
      s.science_domain = std::string(kIdleJobId);
    }
    s.sample_count = js.sample_count();
    s.gpu_energy_mwh = integrate_energy(js);
    s.gpu_hours = gpu_hours(s.sample_count);
    out.push_back(std::move(s));
  }
  return out;
}

inline constexpr std::string_view kJobSummaryHeader = "job_id,science_domain,job_size_class,gpu_energy_mwh,gpu_hours";

inline void write_job_summary(std::ostream& out, const std::vector<JobEnergySummary>& rows) {
  out << kJobSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.job_id << ',' << r.science_domain << ','
        << (r.job_size_class ? std::string(to_string(*r.job_size_class)) : std::string("-")) << ','
        << delimited::format_exact(r.gpu_energy_mwh) << ',' << delimited::format_exact(r.gpu_hours) << '\n';
  }
}

}  // namespace gpupower
