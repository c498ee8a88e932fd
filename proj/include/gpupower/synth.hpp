#pragma once

/// @file synth.hpp
/// @brief Synthetic telemetry/scheduler generator with a known modal
/// composition, and a closed-form oracle of what the pipeline should recover.
///
/// Random numbers come from xoshiro256** (Blackman & Vigna) seeded through
/// splitmix64, so a seed reproduces the same files on every platform:
///   node stream k uses seed  splitmix64(seed + 0x9E3779B97F4A7C15 * (k + 1))
///   uniform draw u in (0,1) = ((x >> 11) + 0.5) * 2^-53
/// Each node draws, per sample in time order: cpu power, then GCD 0..7.
///
/// Job schedule. A job's modes occupy contiguous phases in mode order; phase
/// boundaries sit at round(cumulative_fraction * duration / 15) * 15 seconds
/// from the job start. With `interleaved` the same per-mode window counts are
/// spread across the job by smooth weighted round-robin instead.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpupower::synth {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& w : s_) w = splitmix64(seed);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform strictly inside (lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo == hi ? lo : lo + (hi - lo) * uniform_open(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

inline std::uint64_t node_seed(std::uint64_t seed, std::size_t node_index) {
  std::uint64_t state = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(node_index) + 1);
  return splitmix64(state);
}

struct PowerRange {
  double lo;
  double hi;
  double mean() const { return (lo + hi) / 2.0; }
};

struct JobTemplate {
  std::string job_id;
  std::string domain;
  std::string project_id;
  std::optional<JobSizeClass> size_class;
  std::size_t first_node = 0;
  std::size_t num_nodes = 1;
  std::int64_t begin_offset_s = 0;
  std::int64_t duration_s = 0;
  std::array<double, kModeCount> mixture{};  // fraction of time per OperatingMode
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::size_t node_count = 1;
  std::int64_t duration_s = 3600;
  std::int64_t start_time = 1700000040;  // a multiple of 15
  std::int64_t cadence_s = 2;
  double idle_power_w = 89.0;
  PowerRange cpu_power_w{80.0, 120.0};
  double other_power_w = 300.0;
  std::array<PowerRange, kModeCount> mode_ranges{{{100.0, 200.0}, {200.0, 420.0}, {420.0, 560.0}, {560.0, 600.0}}};
  bool interleaved = false;
  std::vector<JobTemplate> jobs;
};

inline std::string node_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "node%05zu", index);
  return buf;
}

namespace detail {

inline void invalid(const std::string& what) { throw Error(ErrorKind::InvalidSpec, what); }

// Closed bands of the default thresholds: [0,200], [200,420], [420,560], [560,700].
inline constexpr std::array<PowerRange, kModeCount> kBands{{{0.0, 200.0}, {200.0, 420.0}, {420.0, 560.0}, {560.0, 700.0}}};

inline bool strictly_in_band(double w, std::size_t mode) {
  switch (mode) {
    case 0: return w >= 0.0 && w <= 200.0;
    case 1: return w > 200.0 && w <= 420.0;
    case 2: return w > 420.0 && w < 560.0;
    default: return w >= 560.0 && w <= 700.0;
  }
}

}  // namespace detail

/// Throws InvalidSpec when the spec cannot be generated faithfully.
inline void validate(const SynthSpec& spec) {
  using detail::invalid;
  if (spec.node_count == 0 || spec.node_count > kMaxNodes) invalid("node_count must be in 1-9408");
  if (spec.duration_s <= 0 || spec.duration_s % kWindowSeconds) invalid("duration_s must be a positive multiple of 15");
  if (spec.start_time % kWindowSeconds) invalid("start_time must be a multiple of 15");
  if (spec.cadence_s < 1 || spec.cadence_s > kWindowSeconds) invalid("cadence_s must be in 1-15");
  if (!detail::strictly_in_band(spec.idle_power_w, 0)) invalid("idle power must lie in the latency-bound band");
  if (!(spec.cpu_power_w.lo >= 0.0 && spec.cpu_power_w.lo <= spec.cpu_power_w.hi)) invalid("bad cpu power range");
  if (spec.other_power_w < 0.0) invalid("other_power_w must be non-negative");
  for (std::size_t m = 0; m < kModeCount; ++m) {
    const auto& r = spec.mode_ranges[m];
    const auto& band = detail::kBands[m];
    if (!(r.lo <= r.hi && r.lo >= band.lo && r.hi <= band.hi)) {
      invalid("range for " + std::string(to_string(kAllModes[m])) + " must lie inside its band");
    }
    if (r.lo == r.hi && !detail::strictly_in_band(r.lo, m)) {
      invalid("constant power for " + std::string(to_string(kAllModes[m])) + " sits on a band edge");
    }
  }
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> busy(spec.node_count);
  std::map<std::string, int> ids;
  for (const auto& j : spec.jobs) {
    if (j.job_id.empty()) invalid("job_id must be non-empty");
    if (++ids[j.job_id] > 1) invalid("duplicate job_id " + j.job_id);
    if (j.domain.empty()) invalid("job " + j.job_id + ": domain is empty");
    for (char c : j.domain) {
      if (c < 'A' || c > 'Z') invalid("job " + j.job_id + ": domain must be uppercase letters");
    }
    if (j.num_nodes == 0 || j.first_node + j.num_nodes > spec.node_count) invalid("job " + j.job_id + ": node span outside the system");
    if (j.size_class) {
      const auto r = node_range(*j.size_class);
      if (j.num_nodes < r.lo || j.num_nodes > r.hi) invalid("job " + j.job_id + ": node count does not match size class");
    }
    if (j.duration_s <= 0 || j.duration_s % kWindowSeconds || j.begin_offset_s < 0 || j.begin_offset_s % kWindowSeconds) {
      invalid("job " + j.job_id + ": begin offset and duration must be multiples of 15");
    }
    if (j.begin_offset_s + j.duration_s > spec.duration_s) invalid("job " + j.job_id + " runs past the end of the trace");
    double sum = 0.0;
    for (double f : j.mixture) {
      if (f < 0.0) invalid("job " + j.job_id + ": negative mixture fraction");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) invalid("job " + j.job_id + ": mixture must sum to 1");
    for (std::size_t n = j.first_node; n < j.first_node + j.num_nodes; ++n) {
      for (const auto& [b, e] : busy[n]) {
        if (j.begin_offset_s < e && b < j.begin_offset_s + j.duration_s) invalid("job " + j.job_id + " overlaps another job");
      }
      busy[n].push_back({j.begin_offset_s, j.begin_offset_s + j.duration_s});
    }
  }
}

/// Seconds each mode occupies within a job (multiples of 15, summing to the duration).
inline std::array<std::int64_t, kModeCount> phase_lengths(const JobTemplate& j) {
  std::array<std::int64_t, kModeCount> out{};
  const std::int64_t windows = j.duration_s / kWindowSeconds;
  double cumulative = 0.0;
  std::int64_t prev = 0;
  for (std::size_t m = 0; m < kModeCount; ++m) {
    cumulative += j.mixture[m];
    const std::int64_t boundary = m + 1 == kModeCount ? windows : std::llround(cumulative * static_cast<double>(windows));
    out[m] = (boundary - prev) * kWindowSeconds;
    prev = boundary;
  }
  return out;
}

/// Mode index of every 15-s window of a job.
inline std::vector<std::size_t> window_modes(const JobTemplate& j, bool interleaved) {
  const auto lengths = phase_lengths(j);
  std::vector<std::size_t> out;
  if (!interleaved) {
    for (std::size_t m = 0; m < kModeCount; ++m) out.insert(out.end(), static_cast<std::size_t>(lengths[m] / kWindowSeconds), m);
    return out;
  }
  std::array<std::int64_t, kModeCount> weight{}, current{};
  std::int64_t total = 0;
  for (std::size_t m = 0; m < kModeCount; ++m) total += weight[m] = lengths[m] / kWindowSeconds;
  for (std::int64_t w = 0; w < total; ++w) {
    std::size_t best = 0;
    for (std::size_t m = 0; m < kModeCount; ++m) {
      current[m] += weight[m];
      if (current[m] > current[best]) best = m;
    }
    current[best] -= total;
    out.push_back(best);
  }
  return out;
}

inline std::string project_id_of(const JobTemplate& j, std::size_t index) {
  if (!j.project_id.empty()) return j.project_id;
  std::string p;
  for (char c : j.domain) p.push_back(static_cast<char>(c - 'A' + 'a'));
  return p + std::to_string(100 + index);
}

/// Streams the three ingest-compatible files.
inline void generate(const SynthSpec& spec, std::ostream& telemetry, std::ostream& scheduler, std::ostream& allocations) {
  validate(spec);
  // per node: sorted (begin, end, window modes) of the jobs it hosts
  struct Slot {
    std::int64_t begin, end;
    std::vector<std::size_t> modes;
  };
  std::vector<std::vector<Slot>> slots(spec.node_count);
  for (const auto& j : spec.jobs) {
    const auto modes = window_modes(j, spec.interleaved);
    const std::int64_t begin = spec.start_time + j.begin_offset_s;
    for (std::size_t n = j.first_node; n < j.first_node + j.num_nodes; ++n) slots[n].push_back({begin, begin + j.duration_s, modes});
  }

  std::vector<Xoshiro256> rng;
  rng.reserve(spec.node_count);
  for (std::size_t n = 0; n < spec.node_count; ++n) rng.emplace_back(node_seed(spec.seed, n));
  std::vector<std::string> names;
  for (std::size_t n = 0; n < spec.node_count; ++n) names.push_back(node_name(n));

  using delimited::format_fixed;
  telemetry << "timestamp,node_id,input_power_w,cpu_power_w,gcd0_w,gcd1_w,gcd2_w,gcd3_w,gcd4_w,gcd5_w,gcd6_w,gcd7_w\n";
  std::array<double, kGcdsPerNode> gcd{};
  for (std::int64_t t = spec.start_time; t < spec.start_time + spec.duration_s; t += spec.cadence_s) {
    for (std::size_t n = 0; n < spec.node_count; ++n) {
      std::optional<std::size_t> mode;
      for (const auto& s : slots[n]) {
        if (s.begin <= t && t < s.end) mode = s.modes[static_cast<std::size_t>((t - s.begin) / kWindowSeconds)];
      }
      const double cpu = rng[n].uniform(spec.cpu_power_w.lo, spec.cpu_power_w.hi);
      double sum = 0.0;
      for (auto& w : gcd) {
        if (mode) {
          // keep 3-decimal rounding off the band edges
          auto [lo, hi] = spec.mode_ranges[*mode];
          if (hi - lo > 0.002) {
            lo += 0.001;
            hi -= 0.001;
          }
          w = std::round(rng[n].uniform(lo, hi) * 1000.0) / 1000.0;
        } else {
          w = spec.idle_power_w;
        }
        sum += w;
      }
      telemetry << t << ',' << names[n] << ',' << format_fixed(cpu + sum + spec.other_power_w, 3) << ','
                << format_fixed(cpu, 3);
      for (double w : gcd) telemetry << ',' << format_fixed(w, 3);
      telemetry << '\n';
    }
  }

  scheduler << "job_id,project_id,num_nodes,begin_time,end_time\n";
  allocations << "job_id,node_id\n";
  for (std::size_t i = 0; i < spec.jobs.size(); ++i) {
    const auto& j = spec.jobs[i];
    const std::int64_t begin = spec.start_time + j.begin_offset_s;
    scheduler << j.job_id << ',' << project_id_of(j, i) << ',' << j.num_nodes << ',' << begin << ','
              << begin + j.duration_s << '\n';
    for (std::size_t n = j.first_node; n < j.first_node + j.num_nodes; ++n) allocations << j.job_id << ',' << names[n] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

struct ExpectedMode {
  double gpu_hours = 0.0;
  double energy_mwh = 0.0;
};

struct ExpectedDecomposition {
  std::array<ExpectedMode, kModeCount> modes{};

  double total_hours() const {
    double s = 0.0;
    for (const auto& m : modes) s += m.gpu_hours;
    return s;
  }
  double total_energy() const {
    double s = 0.0;
    for (const auto& m : modes) s += m.energy_mwh;
    return s;
  }
  double hours_pct(std::size_t m) const { return total_hours() > 0.0 ? modes[m].gpu_hours / total_hours() * 100.0 : 0.0; }
};

struct ExpectedSavings {
  std::string cap_type;
  double cap_value = 0.0;
  double ci_mwh = 0.0;
  double mi_mwh = 0.0;
  double total_mwh = 0.0;
  double savings_pct = 0.0;
  double savings_pct_dt0 = 0.0;
};

struct Oracle {
  ExpectedDecomposition system;
  /// Keyed by (domain, size class label); idle time is keyed ("IDLE", "-").
  std::map<std::pair<std::string, std::string>, ExpectedDecomposition> slices;
};

/// Closed-form expectation: every phase contributes duration x nodes x 8
/// GCD-seconds at the mean of its mode's power range; idle node time runs at
/// the idle power.
inline Oracle oracle(const SynthSpec& spec) {
  validate(spec);
  Oracle out;
  const double gcds = static_cast<double>(kGcdsPerNode);
  auto add = [&](ExpectedDecomposition& d, std::size_t mode, double gcd_seconds, double watts) {
    d.modes[mode].gpu_hours += gcd_seconds / 3600.0;
    d.modes[mode].energy_mwh += gcd_seconds * watts / 3.6e9;
  };
  double job_node_seconds = 0.0;
  for (const auto& j : spec.jobs) {
    std::string size = "-";
    const std::size_t n = j.num_nodes;
    if (n >= 5645) size = "A";
    else if (n >= 1882) size = "B";
    else if (n >= 184) size = "C";
    else if (n >= 92) size = "D";
    else size = "E";
    auto& slice = out.slices[{j.domain, size}];
    const auto lengths = phase_lengths(j);
    for (std::size_t m = 0; m < kModeCount; ++m) {
      const double gcd_seconds = static_cast<double>(lengths[m]) * static_cast<double>(n) * gcds;
      add(out.system, m, gcd_seconds, spec.mode_ranges[m].mean());
      add(slice, m, gcd_seconds, spec.mode_ranges[m].mean());
    }
    job_node_seconds += static_cast<double>(j.duration_s) * static_cast<double>(n);
  }
  const double idle_gcd_seconds =
      (static_cast<double>(spec.node_count) * static_cast<double>(spec.duration_s) - job_node_seconds) * gcds;
  if (idle_gcd_seconds > 0.0) {
    add(out.system, 0, idle_gcd_seconds, spec.idle_power_w);
    add(out.slices[{"IDLE", "-"}], 0, idle_gcd_seconds, spec.idle_power_w);
  }
  return out;
}

/// Savings expected for the system decomposition given per-cap energy
/// percentages (vai_energy_pct, mb_energy_pct).
struct CapEnergyPct {
  std::string cap_type;
  double cap_value;
  double vai_energy_pct;
  double mb_energy_pct;
};

inline std::vector<ExpectedSavings> oracle_savings(const ExpectedDecomposition& d, const std::vector<CapEnergyPct>& caps) {
  std::vector<ExpectedSavings> out;
  const double e_mi = d.modes[1].energy_mwh, e_ci = d.modes[2].energy_mwh, e_total = d.total_energy();
  for (const auto& c : caps) {
    ExpectedSavings s;
    s.cap_type = c.cap_type;
    s.cap_value = c.cap_value;
    s.ci_mwh = e_ci - e_ci * c.vai_energy_pct / 100.0;
    s.mi_mwh = e_mi - e_mi * c.mb_energy_pct / 100.0;
    s.total_mwh = s.ci_mwh + s.mi_mwh;
    s.savings_pct = e_total > 0.0 ? 100.0 * s.total_mwh / e_total : 0.0;
    s.savings_pct_dt0 = e_total > 0.0 ? 100.0 * s.mi_mwh / e_total : 0.0;
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline void from_json(const nlohmann::json& j, PowerRange& r) {
  r.lo = j.at(0).get<double>();
  r.hi = j.at(1).get<double>();
}

inline std::array<double, kModeCount> parse_mixture(const nlohmann::json& j) {
  std::array<double, kModeCount> mix{};
  for (const auto& [key, value] : j.items()) {
    const auto mode = parse_mode(key);
    if (!mode) throw Error(ErrorKind::InvalidSpec, "unknown mode '" + key + "' in mixture");
    mix[index_of(*mode)] = value.get<double>();
  }
  return mix;
}

/// Parses a spec document; absent keys keep their defaults.
inline SynthSpec parse_spec(const nlohmann::json& j) {
  SynthSpec s;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("seed", s.seed);
    get("node_count", s.node_count);
    get("duration_s", s.duration_s);
    get("start_time", s.start_time);
    get("cadence_s", s.cadence_s);
    get("idle_power_w", s.idle_power_w);
    get("other_power_w", s.other_power_w);
    get("interleaved", s.interleaved);
    if (j.contains("cpu_power_w")) s.cpu_power_w = j.at("cpu_power_w").get<PowerRange>();
    if (j.contains("mode_ranges")) {
      for (const auto& [key, value] : j.at("mode_ranges").items()) {
        const auto mode = parse_mode(key);
        if (!mode) throw Error(ErrorKind::InvalidSpec, "unknown mode '" + key + "' in mode_ranges");
        s.mode_ranges[index_of(*mode)] = value.get<PowerRange>();
      }
    }
    std::size_t index = 0;
    for (const auto& jt : j.value("jobs", nlohmann::json::array())) {
      JobTemplate t;
      t.job_id = jt.value("job_id", "J" + std::to_string(index + 1));
      t.domain = jt.at("domain").get<std::string>();
      t.project_id = jt.value("project_id", std::string());
      if (jt.contains("size_class")) {
        t.size_class = parse_size_class(jt.at("size_class").get<std::string>());
        if (!t.size_class) throw Error(ErrorKind::InvalidSpec, "unknown size class in job " + t.job_id);
      }
      t.first_node = jt.value("first_node", std::size_t{0});
      t.num_nodes = jt.at("num_nodes").get<std::size_t>();
      t.begin_offset_s = jt.value("begin_offset_s", std::int64_t{0});
      t.duration_s = jt.at("duration_s").get<std::int64_t>();
      t.mixture = parse_mixture(jt.at("mixture"));
      s.jobs.push_back(std::move(t));
      ++index;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("spec: ") + e.what());
  }
  validate(s);
  return s;
}

inline nlohmann::json to_json(const ExpectedDecomposition& d) {
  auto modes = nlohmann::json::array();
  for (std::size_t m = 0; m < kModeCount; ++m) {
    modes.push_back({{"mode", to_string(kAllModes[m])},
                     {"gpu_hours", d.modes[m].gpu_hours},
                     {"energy_mwh", d.modes[m].energy_mwh},
                     {"hours_pct", d.hours_pct(m)}});
  }
  return {{"modes", modes}, {"total_gpu_hours", d.total_hours()}, {"total_energy_mwh", d.total_energy()}};
}

inline nlohmann::json to_json(const Oracle& o, const std::vector<ExpectedSavings>& savings = {}) {
  nlohmann::json j;
  j["decomposition"] = to_json(o.system);
  auto slices = nlohmann::json::array();
  for (const auto& [key, d] : o.slices) {
    auto s = to_json(d);
    s["domain"] = key.first;
    s["size_class"] = key.second;
    slices.push_back(s);
  }
  j["slices"] = slices;
  auto proj = nlohmann::json::array();
  for (const auto& s : savings) {
    proj.push_back({{"cap_type", s.cap_type},
                    {"cap_value", s.cap_value},
                    {"ci_mwh", s.ci_mwh},
                    {"mi_mwh", s.mi_mwh},
                    {"total_mwh", s.total_mwh},
                    {"savings_pct", s.savings_pct},
                    {"savings_pct_dt0", s.savings_pct_dt0}});
  }
  j["projection"] = proj;
  return j;
}

}  // namespace gpupower::synth
