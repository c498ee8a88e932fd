#pragma once

/// @file modal.hpp
/// @brief GPU power histograms and decomposition of GCD samples into the four
/// operating modes, system-wide or sliced by science domain and job size.
///
/// Both reductions are commutative monoids: shards can be accumulated
/// independently and merged.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>
#include <gpupower/jobjoin.hpp>

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace gpupower {

/// Band membership for one GCD reading. Monotone in watts.
inline OperatingMode classify_sample(double watts, const ModeThresholds& t = {}) {
  const bool below_low = t.low_tie_upper ? watts < t.t_low : watts <= t.t_low;
  if (below_low) return OperatingMode::LatencyBound;
  const bool below_mid = t.mid_tie_upper ? watts < t.t_mid : watts <= t.t_mid;
  if (below_mid) return OperatingMode::MemoryIntensive;
  const bool below_tdp = t.tdp_tie_upper ? watts < t.t_tdp : watts <= t.t_tdp;
  if (below_tdp) return OperatingMode::ComputeIntensive;
  return OperatingMode::Boosted;
}

// ---------------------------------------------------------------------------
// Histogram
// ---------------------------------------------------------------------------

/// Counts of GCD samples per fixed-width bin over [0, 700). Readings at the
/// 700 W ceiling fall into the last bin.
class PowerHistogram {
 public:
  static constexpr double kRangeWatts = kMaxGcdWatts;

  explicit PowerHistogram(double bin_width = 5.0) : bin_width_(bin_width) {
    if (!(bin_width > 0.0)) throw Error(ErrorKind::Validation, "bin width must be positive");
    counts_.assign(static_cast<std::size_t>(std::ceil(kRangeWatts / bin_width)), 0);
  }

  void add(double watts) {
    auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(watts / bin_width_)));
    if (bin >= counts_.size()) bin = counts_.size() - 1;
    ++counts_[bin];
    ++total_;
  }

  void merge(const PowerHistogram& other) {
    if (other.bin_width_ != bin_width_) throw Error(ErrorKind::Validation, "cannot merge histograms of different widths");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
  }

  double bin_width() const { return bin_width_; }
  double bin_start(std::size_t i) const { return static_cast<double>(i) * bin_width_; }
  std::size_t bin_of(double watts) const {
    auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(watts / bin_width_)));
    return std::min(bin, counts_.size() - 1);
  }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t total_count() const { return total_; }

  /// Probability density of bin i (count / (total * width)); 0 for an empty histogram.
  double density(std::size_t i) const {
    return total_ ? static_cast<double>(counts_[i]) / (static_cast<double>(total_) * bin_width_) : 0.0;
  }

 private:
  double bin_width_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

template <typename Sample>
PowerHistogram histogram(const std::vector<Sample>& samples, double bin_width = 5.0) {
  PowerHistogram h(bin_width);
  for (const auto& s : samples) {
    for (double w : s.gcd_power) h.add(w);
  }
  return h;
}

inline void write_histogram(std::ostream& out, const PowerHistogram& h) {
  out << "bin_start_w,count\n";
  for (std::size_t i = 0; i < h.counts().size(); ++i) {
    out << delimited::format_exact(h.bin_start(i)) << ',' << h.counts()[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

struct ModeStats {
  std::size_t sample_count = 0;
  double gpu_hours = 0.0;
  double energy_mwh = 0.0;
  double hours_pct = 0.0;
  double energy_pct = 0.0;
};

/// Key of a sliced decomposition. An absent size class marks the IDLE slice
/// or a domain-only slice.
struct SliceKey {
  std::string domain;
  std::optional<JobSizeClass> size_class;

  friend bool operator==(const SliceKey&, const SliceKey&) = default;
  friend bool operator<(const SliceKey& a, const SliceKey& b) {
    return std::tie(a.domain, a.size_class) < std::tie(b.domain, b.size_class);
  }
};

struct ModalDecomposition {
  std::array<ModeStats, kModeCount> modes{};
  std::size_t total_samples = 0;
  double total_gpu_hours = 0.0;
  double total_energy_mwh = 0.0;
  std::optional<SliceKey> slice;

  const ModeStats& operator[](OperatingMode m) const { return modes[index_of(m)]; }
  ModeStats& operator[](OperatingMode m) { return modes[index_of(m)]; }

  /// Recomputes totals and percentages from the per-mode counts, hours and energy.
  void refresh() {
    total_samples = 0;
    total_gpu_hours = 0.0;
    total_energy_mwh = 0.0;
    for (const auto& m : modes) {
      total_samples += m.sample_count;
      total_gpu_hours += m.gpu_hours;
      total_energy_mwh += m.energy_mwh;
    }
    for (auto& m : modes) {
      m.hours_pct = total_gpu_hours > 0.0 ? m.gpu_hours / total_gpu_hours * 100.0 : 0.0;
      m.energy_pct = total_energy_mwh != 0.0 ? m.energy_mwh / total_energy_mwh * 100.0 : 0.0;
    }
  }

  /// Associative, commutative merge; the slice key of `this` is kept.
  void merge(const ModalDecomposition& other) {
    for (std::size_t i = 0; i < kModeCount; ++i) {
      modes[i].sample_count += other.modes[i].sample_count;
      modes[i].gpu_hours += other.modes[i].gpu_hours;
      modes[i].energy_mwh += other.modes[i].energy_mwh;
    }
    refresh();
  }
};

/// Running per-mode sums; `finish` produces the decomposition.
class ModeAccumulator {
 public:
  explicit ModeAccumulator(const ModeThresholds& t = {}) : thresholds_(validate(t)) {}

  void add(double watts) {
    const auto i = index_of(classify_sample(watts, thresholds_));
    ++counts_[i];
    joules_[i] += watts * static_cast<double>(kWindowSeconds);
  }

  void merge(const ModeAccumulator& other) {
    for (std::size_t i = 0; i < kModeCount; ++i) {
      counts_[i] += other.counts_[i];
      joules_[i] += other.joules_[i];
    }
  }

  ModalDecomposition finish(std::optional<SliceKey> slice = std::nullopt) const {
    ModalDecomposition d;
    for (std::size_t i = 0; i < kModeCount; ++i) {
      d.modes[i].sample_count = counts_[i];
      d.modes[i].gpu_hours = gpu_hours(counts_[i]);
      d.modes[i].energy_mwh = joules_[i] / kJoulesPerMwh;
    }
    d.slice = std::move(slice);
    d.refresh();
    return d;
  }

 private:
  ModeThresholds thresholds_;
  std::array<std::size_t, kModeCount> counts_{};
  std::array<double, kModeCount> joules_{};
};

/// System-wide decomposition of every GCD reading in aggregated samples.
template <typename Sample>
ModalDecomposition decompose(const std::vector<Sample>& samples, const ModeThresholds& t = {}) {
  ModeAccumulator acc(t);
  for (const auto& s : samples) {
    for (double w : s.gcd_power) acc.add(w);
  }
  return acc.finish();
}

inline void accumulate(ModeAccumulator& acc, const JobPowerSeries& job) {
  for (const auto& [_, series] : job.series) {
    for (const auto& p : series) acc.add(p.watts);
  }
}

/// System-wide decomposition of joined series (jobs plus IDLE).
inline ModalDecomposition decompose(const JoinResult& joined, const ModeThresholds& t = {}) {
  ModeAccumulator acc(t);
  for (const auto& [_, job] : joined.jobs) accumulate(acc, job);
  return acc.finish();
}

enum class SliceBy { Domain, DomainSize };

/// One decomposition per science domain (SliceBy::Domain) or per
/// (domain, size class) cell. IDLE samples form their own slice keyed
/// {"IDLE", none}, so the slices always partition the system total.
inline std::map<SliceKey, ModalDecomposition> decompose_sliced(const JoinResult& joined,
                                                               const std::vector<JobRecord>& jobs, SliceBy by,
                                                               const ModeThresholds& t = {}) {
  std::unordered_map<std::string, SliceKey> key_of;
  for (const auto& j : jobs) {
    SliceKey k{j.science_domain.empty() ? derive_domain(j.project_id) : j.science_domain, std::nullopt};
    if (by == SliceBy::DomainSize) k.size_class = classify_job_size(j.num_nodes);
    key_of.emplace(j.job_id, std::move(k));
  }
  std::map<SliceKey, ModeAccumulator> accs;
  for (const auto& [id, job] : joined.jobs) {
    auto it = key_of.find(id);
    const SliceKey key = it != key_of.end() ? it->second : SliceKey{std::string(kIdleJobId), std::nullopt};
    accumulate(accs.try_emplace(key, t).first->second, job);
  }
  std::map<SliceKey, ModalDecomposition> out;
  for (const auto& [key, acc] : accs) out.emplace(key, acc.finish(key));
  return out;
}

/// Merge of every slice; equals the unsliced decomposition up to summation order.
inline ModalDecomposition merge_all(const std::map<SliceKey, ModalDecomposition>& slices) {
  ModalDecomposition d;
  for (const auto& [_, s] : slices) d.merge(s);
  d.refresh();
  return d;
}

// ---------------------------------------------------------------------------
// Decomposition files
// ---------------------------------------------------------------------------

inline constexpr std::string_view kDecompositionHeader = "mode,sample_count,gpu_hours,energy_mwh,hours_pct,energy_pct";
inline constexpr std::string_view kSlicedDecompositionHeader =
    "domain,size_class,mode,sample_count,gpu_hours,energy_mwh,hours_pct,energy_pct";

namespace detail {

inline void write_mode_rows(std::ostream& out, const ModalDecomposition& d, const std::string& prefix) {
  for (auto m : kAllModes) {
    const auto& s = d[m];
    out << prefix << to_string(m) << ',' << s.sample_count << ',' << delimited::format_exact(s.gpu_hours) << ','
        << delimited::format_exact(s.energy_mwh) << ',' << delimited::format_exact(s.hours_pct) << ','
        << delimited::format_exact(s.energy_pct) << '\n';
  }
}

}  // namespace detail

inline void write_decomposition(std::ostream& out, const ModalDecomposition& d) {
  out << kDecompositionHeader << '\n';
  detail::write_mode_rows(out, d, "");
}

inline void write_decomposition(std::ostream& out, const std::map<SliceKey, ModalDecomposition>& slices) {
  out << kSlicedDecompositionHeader << '\n';
  for (const auto& [key, d] : slices) {
    const std::string size = key.size_class ? std::string(to_string(*key.size_class)) : std::string("-");
    detail::write_mode_rows(out, d, key.domain + "," + size + ",");
  }
}

/// Reads either layout. An unsliced file yields one entry keyed {"ALL", none}.
/// Percentages are recomputed from hours and energy.
inline std::map<SliceKey, ModalDecomposition> read_decomposition(std::istream& in) {
  delimited::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(0, "empty decomposition file");
  const auto header = delimited::trim(line);
  const bool sliced = header == kSlicedDecompositionHeader;
  if (!sliced && header != kDecompositionHeader) throw ParseError(reader.line_no(), "unrecognized decomposition header");
  const std::size_t offset = sliced ? 2 : 0;

  std::map<SliceKey, ModalDecomposition> out;
  while (reader.next(line)) {
    const auto f = delimited::split(line);
    const std::size_t ln = reader.line_no();
    if (f.size() != offset + 6) throw ParseError(ln, "expected " + std::to_string(offset + 6) + " columns");
    SliceKey key{"ALL", std::nullopt};
    if (sliced) {
      key.domain = std::string(f[0]);
      if (key.domain.empty()) throw ParseError(ln, "empty domain");
      if (f[1] != "-") {
        key.size_class = parse_size_class(f[1]);
        if (!key.size_class) throw ParseError(ln, "unknown size class '" + std::string(f[1]) + "'");
      }
    }
    const auto mode = parse_mode(f[offset]);
    if (!mode) throw ParseError(ln, "unknown mode '" + std::string(f[offset]) + "'");
    const auto count = delimited::parse_int(f[offset + 1]);
    const auto hours = delimited::parse_double(f[offset + 2]);
    const auto energy = delimited::parse_double(f[offset + 3]);
    if (!count || *count < 0 || !hours || *hours < 0.0 || !energy || !std::isfinite(*energy)) {
      throw ParseError(ln, "bad numeric field");
    }
    auto& d = out[key];
    d.slice = sliced ? std::optional<SliceKey>(key) : std::nullopt;
    auto& s = d[*mode];
    s.sample_count = static_cast<std::size_t>(*count);
    s.gpu_hours = *hours;
    s.energy_mwh = *energy;
  }
  for (auto& [_, d] : out) d.refresh();
  return out;
}

}  // namespace gpupower
