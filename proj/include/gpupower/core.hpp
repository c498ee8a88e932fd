#pragma once

/// @file core.hpp
/// @brief Domain types shared by every stage of the power-analysis pipeline:
/// node power samples, scheduler records, operating modes, cap settings and
/// the error hierarchy.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gpupower {

/// Graphics Compute Dies per node (4 GPUs x 2 GCDs).
inline constexpr std::size_t kGcdsPerNode = 8;
/// Sanity ceiling for a single GCD reading; admits boost samples above TDP.
inline constexpr double kMaxGcdWatts = 700.0;
inline constexpr double kFrequencyMaxMhz = 1700.0;
inline constexpr double kTdpWatts = 560.0;
inline constexpr std::int64_t kWindowSeconds = 15;
inline constexpr std::size_t kMaxNodes = 9408;
/// Joules per megawatt-hour.
inline constexpr double kJoulesPerMwh = 3.6e9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorKind {
  InvalidPower,
  WrongGcdCount,
  Parse,
  Io,
  Validation,
  EmptyProjectId,
  OutOfRange,
  CapBelowIdle,
  EmptyGrid,
  MissingCapRow,
  UnknownDomain,
  UnknownSize,
  InvalidSpec,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input; carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-fatal diagnostics collected while parsing or joining.
struct Warning {
  enum class Kind { DanglingAllocation, NodeCountMismatch, JobWithoutNodes, OverlappingJobs, IdentityViolation, SkippedRow };
  Kind kind;
  std::string message;
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

/// One node's instantaneous power reading. All powers in watts.
struct PowerSample {
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  std::string node_id;
  double input_power = 0.0;
  double cpu_power = 0.0;
  std::vector<double> gcd_power = std::vector<double>(kGcdsPerNode, 0.0);

  friend bool operator==(const PowerSample&, const PowerSample&) = default;
};

/// Mean of the samples falling in one 15-second window; timestamp is the window start.
struct AggregatedSample : PowerSample {
  std::size_t contributing = 0;

  friend bool operator==(const AggregatedSample&, const AggregatedSample&) = default;
};

inline std::int64_t window_start(std::int64_t timestamp) {
  // floor division so pre-epoch timestamps still land on multiples of 15
  std::int64_t q = timestamp / kWindowSeconds;
  if (timestamp % kWindowSeconds != 0 && timestamp < 0) --q;
  return q * kWindowSeconds;
}

inline bool is_window_aligned(const AggregatedSample& s) { return s.timestamp % kWindowSeconds == 0; }

/// Returns `s` unchanged when every invariant holds; throws otherwise.
inline const PowerSample& validate_sample(const PowerSample& s) {
  if (s.gcd_power.size() != kGcdsPerNode) {
    throw Error(ErrorKind::WrongGcdCount,
                "expected " + std::to_string(kGcdsPerNode) + " GCD readings, got " + std::to_string(s.gcd_power.size()));
  }
  auto bad = [](double w) { return !std::isfinite(w) || w < 0.0; };
  if (bad(s.input_power) || bad(s.cpu_power)) {
    throw Error(ErrorKind::InvalidPower, "node/cpu power must be finite and non-negative");
  }
  for (std::size_t i = 0; i < s.gcd_power.size(); ++i) {
    const double w = s.gcd_power[i];
    if (bad(w) || w > kMaxGcdWatts) {
      throw Error(ErrorKind::InvalidPower, "gcd" + std::to_string(i) + " power " + std::to_string(w) + " outside [0, 700] W");
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scheduler metadata
// ---------------------------------------------------------------------------

struct JobRecord {
  std::string job_id;
  std::string project_id;
  std::string science_domain;
  std::int64_t begin_time = 0;
  std::int64_t end_time = 0;
  std::size_t num_nodes = 0;
  std::set<std::string> node_ids;

  bool contains(std::int64_t t) const { return begin_time <= t && t < end_time; }
};

struct AllocationRow {
  std::string job_id;
  std::string node_id;
};

/// Scheduler size classes by node count.
enum class JobSizeClass { A, B, C, D, E };

inline constexpr std::array<JobSizeClass, 5> kAllSizeClasses = {JobSizeClass::A, JobSizeClass::B, JobSizeClass::C,
                                                                 JobSizeClass::D, JobSizeClass::E};

struct NodeRange {
  std::size_t lo;
  std::size_t hi;
};

inline constexpr NodeRange node_range(JobSizeClass c) {
  switch (c) {
    case JobSizeClass::A: return {5645, 9408};
    case JobSizeClass::B: return {1882, 5644};
    case JobSizeClass::C: return {184, 1881};
    case JobSizeClass::D: return {92, 183};
    case JobSizeClass::E: return {1, 91};
  }
  return {0, 0};
}

inline constexpr std::string_view to_string(JobSizeClass c) {
  constexpr std::array<std::string_view, 5> names = {"A", "B", "C", "D", "E"};
  return names[static_cast<std::size_t>(c)];
}

inline std::optional<JobSizeClass> parse_size_class(std::string_view s) {
  for (auto c : kAllSizeClasses) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Operating modes
// ---------------------------------------------------------------------------

enum class OperatingMode { LatencyBound, MemoryIntensive, ComputeIntensive, Boosted };

inline constexpr std::size_t kModeCount = 4;
inline constexpr std::array<OperatingMode, kModeCount> kAllModes = {
    OperatingMode::LatencyBound, OperatingMode::MemoryIntensive, OperatingMode::ComputeIntensive,
    OperatingMode::Boosted};

inline constexpr std::size_t index_of(OperatingMode m) { return static_cast<std::size_t>(m); }

inline constexpr std::string_view to_string(OperatingMode m) {
  constexpr std::array<std::string_view, kModeCount> names = {"LatencyBound", "MemoryIntensive", "ComputeIntensive",
                                                              "Boosted"};
  return names[index_of(m)];
}

inline std::optional<OperatingMode> parse_mode(std::string_view s) {
  for (auto m : kAllModes) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

/// Power bands separating the four modes. Which side of an interior boundary
/// a tie falls on is configurable; the defaults follow "<= t_low", "<= t_mid"
/// and ">= t_tdp".
struct ModeThresholds {
  double t_low = 200.0;
  double t_mid = 420.0;
  double t_tdp = 560.0;
  bool low_tie_upper = false;  // true: w == t_low is MemoryIntensive
  bool mid_tie_upper = false;  // true: w == t_mid is ComputeIntensive
  bool tdp_tie_upper = true;   // true: w == t_tdp is Boosted

  bool valid() const { return 0.0 < t_low && t_low < t_mid && t_mid < t_tdp; }
};

inline const ModeThresholds& validate(const ModeThresholds& t) {
  if (!t.valid()) throw Error(ErrorKind::Validation, "thresholds must satisfy 0 < t_low < t_mid < t_tdp");
  return t;
}

// ---------------------------------------------------------------------------
// Cap settings
// ---------------------------------------------------------------------------

struct FrequencyCap {
  double mhz;
  friend bool operator==(const FrequencyCap&, const FrequencyCap&) = default;
};
struct PowerCap {
  double watts;
  friend bool operator==(const PowerCap&, const PowerCap&) = default;
};
struct Uncapped {
  friend bool operator==(const Uncapped&, const Uncapped&) = default;
};

using CapSetting = std::variant<FrequencyCap, PowerCap, Uncapped>;

inline bool is_valid(const CapSetting& cap) {
  if (auto f = std::get_if<FrequencyCap>(&cap)) return f->mhz > 0.0 && f->mhz <= kFrequencyMaxMhz;
  if (auto p = std::get_if<PowerCap>(&cap)) return p->watts > 0.0 && p->watts <= kTdpWatts;
  return true;
}

inline const CapSetting& validate(const CapSetting& cap) {
  if (!is_valid(cap)) throw Error(ErrorKind::Validation, "cap outside (0, 1700] MHz / (0, 560] W");
  return cap;
}

/// True for settings equivalent to running uncapped (1700 MHz, 560 W).
inline bool is_baseline(const CapSetting& cap) {
  if (auto f = std::get_if<FrequencyCap>(&cap)) return f->mhz == kFrequencyMaxMhz;
  if (auto p = std::get_if<PowerCap>(&cap)) return p->watts == kTdpWatts;
  return true;
}

inline std::string_view cap_type(const CapSetting& cap) {
  if (std::holds_alternative<FrequencyCap>(cap)) return "freq";
  if (std::holds_alternative<PowerCap>(cap)) return "power";
  return "none";
}

inline double cap_value(const CapSetting& cap) {
  if (auto f = std::get_if<FrequencyCap>(&cap)) return f->mhz;
  if (auto p = std::get_if<PowerCap>(&cap)) return p->watts;
  return 0.0;
}

/// Inverse of cap_type/cap_value. Throws Validation on unknown type or range.
inline CapSetting make_cap(std::string_view type, double value) {
  CapSetting cap;
  if (type == "freq") {
    cap = FrequencyCap{value};
  } else if (type == "power") {
    cap = PowerCap{value};
  } else if (type == "none") {
    cap = Uncapped{};
  } else {
    throw Error(ErrorKind::Validation, "unknown cap type '" + std::string(type) + "'");
  }
  validate(cap);
  return cap;
}

/// Two settings name the same row of a characterization table.
inline bool same_cap(const CapSetting& a, const CapSetting& b) {
  if (a.index() != b.index()) return false;
  return std::abs(cap_value(a) - cap_value(b)) < 1e-9;
}

}  // namespace gpupower
