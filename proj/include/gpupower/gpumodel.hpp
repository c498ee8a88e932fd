#pragma once

/// @file gpumodel.hpp
/// @brief Analytical models of the variable-arithmetic-intensity (VAI)
/// roofline benchmark and the L2/HBM memory benchmark under frequency and
/// power caps, and the characterization table built from them.
///
/// Power model. At the maximum clock the sustained power of a VAI kernel is a
/// piecewise-linear function of log2(AI) through the configured anchors. A
/// clock f scales the dynamic part: P(f) = p_idle + (P_fmax - p_idle) (f/f_max)^alpha.
/// A power cap throttles the clock until P(f) meets the cap, and is a no-op
/// whenever the uncapped power already fits.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpupower::model {

inline constexpr double kMiB = 1024.0 * 1024.0;
inline constexpr double kKiB = 1024.0;

/// Kernel shape of one VAI run: each work item reads a, b, c, performs
/// `loopsize` fused multiply-adds (2 FLOP each) and writes c back.
/// loopsize 0 is the stream copy c[i] = b[i].
struct VaiKernelSpec {
  std::uint64_t loopsize = 1;
  std::uint64_t global_work_items = 1u << 26;
  std::uint64_t repeat = 100;
  std::uint64_t element_size = 8;
};

inline double flops_per_item(const VaiKernelSpec& k) { return 2.0 * static_cast<double>(k.loopsize); }

inline double bytes_per_item(const VaiKernelSpec& k) {
  return (k.loopsize == 0 ? 2.0 : 4.0) * static_cast<double>(k.element_size);
}

/// FLOP per byte moved.
inline double ai_of(const VaiKernelSpec& k) {
  if (k.element_size == 0) throw Error(ErrorKind::Validation, "element_size must be positive");
  return flops_per_item(k) / bytes_per_item(k);
}

struct PowerAnchor {
  double ai;
  double watts;  // sustained power at f_max
};

struct GcdModelParams {
  double f_max = kFrequencyMaxMhz;
  double tdp = kTdpWatts;
  double p_idle = 89.0;
  double peak_flops_at_fmax = 23.9e12;
  /// Effective streaming bandwidth; the default places the ridge point at AI 4.
  double peak_bw_at_fmax = 23.9e12 / 4.0;
  std::vector<PowerAnchor> power_anchors = {{1.0 / 16.0, 380.0}, {4.0, 540.0}, {1024.0, 420.0}};
  double alpha = 1.0;
  double beta_vai = 1.0;

  void validate() const {
    if (!(f_max > 0.0)) throw Error(ErrorKind::Validation, "f_max must be positive");
    if (!(p_idle >= 0.0 && p_idle < tdp)) throw Error(ErrorKind::Validation, "p_idle must lie in [0, tdp)");
    if (!(peak_flops_at_fmax > 0.0 && peak_bw_at_fmax > 0.0)) {
      throw Error(ErrorKind::Validation, "peak FLOP/s and bandwidth must be positive");
    }
    if (power_anchors.empty()) throw Error(ErrorKind::Validation, "at least one power anchor is required");
    for (std::size_t i = 0; i < power_anchors.size(); ++i) {
      const auto& a = power_anchors[i];
      if (!(a.ai > 0.0)) throw Error(ErrorKind::Validation, "anchor AI must be positive");
      if (!(a.watts > p_idle && a.watts <= tdp)) throw Error(ErrorKind::Validation, "anchor watts must lie in (p_idle, tdp]");
      if (i && !(power_anchors[i - 1].ai < a.ai)) throw Error(ErrorKind::Validation, "anchors must be sorted by AI");
    }
    if (!(alpha > 0.0 && beta_vai >= 0.0)) throw Error(ErrorKind::Validation, "alpha must be positive, beta non-negative");
  }
};

/// Memory-hierarchy benchmark: a 100000-block x 1024-thread kernel sweeping
/// a buffer that starts at 384 KiB. L2-resident data streams at a
/// clock-proportional rate; HBM-resident data is clock-insensitive but costs
/// extra power that the core-side cap does not see.
struct MemModelParams {
  double l2_size = 16.0 * kMiB;
  double l2_bw_at_fmax = 6.0e12;
  double hbm_bw = 1.6e12;
  /// Sustained core power of the streaming kernel at f_max.
  double core_power_at_fmax = 240.0;
  double hbm_extra_power = 40.0;
  /// Power caps below this starve the memory pipeline: HBM bandwidth scales
  /// by (cap - p_idle) / (floor - p_idle).
  double hbm_bw_floor_cap = 230.0;
  double chunk_start = 384.0 * kKiB;
  std::uint64_t blocks = 100000;
  std::uint64_t threads_per_block = 1024;
  std::uint64_t element_size = 8;

  void validate(const GcdModelParams& gcd) const {
    if (!(l2_bw_at_fmax > hbm_bw && hbm_bw > 0.0)) throw Error(ErrorKind::Validation, "need l2_bw_at_fmax > hbm_bw > 0");
    if (!(l2_size > 0.0 && chunk_start > 0.0)) throw Error(ErrorKind::Validation, "sizes must be positive");
    if (!(core_power_at_fmax > gcd.p_idle && core_power_at_fmax <= gcd.tdp)) {
      throw Error(ErrorKind::Validation, "core_power_at_fmax must lie in (p_idle, tdp]");
    }
    if (hbm_extra_power < 0.0) throw Error(ErrorKind::Validation, "hbm_extra_power must be non-negative");
    if (!(hbm_bw_floor_cap > gcd.p_idle)) throw Error(ErrorKind::Validation, "hbm_bw_floor_cap must exceed p_idle");
    if (blocks == 0 || threads_per_block == 0 || element_size == 0) {
      throw Error(ErrorKind::Validation, "kernel shape must be positive");
    }
  }
};

struct ModelParams {
  GcdModelParams gcd;
  MemModelParams mem;

  void validate() const {
    gcd.validate();
    mem.validate(gcd);
  }
};

// ---------------------------------------------------------------------------
// Parameter files (JSON). Missing keys keep the Frontier defaults.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const ModelParams& p) {
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& a : p.gcd.power_anchors) anchors.push_back({a.ai, a.watts});
  j = {{"gcd",
        {{"f_max", p.gcd.f_max},
         {"tdp", p.gcd.tdp},
         {"p_idle", p.gcd.p_idle},
         {"peak_flops_at_fmax", p.gcd.peak_flops_at_fmax},
         {"peak_bw_at_fmax", p.gcd.peak_bw_at_fmax},
         {"power_anchors", anchors},
         {"alpha", p.gcd.alpha},
         {"beta_vai", p.gcd.beta_vai}}},
       {"mem",
        {{"l2_size", p.mem.l2_size},
         {"l2_bw_at_fmax", p.mem.l2_bw_at_fmax},
         {"hbm_bw", p.mem.hbm_bw},
         {"core_power_at_fmax", p.mem.core_power_at_fmax},
         {"hbm_extra_power", p.mem.hbm_extra_power},
         {"hbm_bw_floor_cap", p.mem.hbm_bw_floor_cap},
         {"chunk_start", p.mem.chunk_start},
         {"blocks", p.mem.blocks},
         {"threads_per_block", p.mem.threads_per_block},
         {"element_size", p.mem.element_size}}}};
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
  auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
    if (obj.contains(key)) obj.at(key).get_to(field);
  };
  if (j.contains("gcd")) {
    const auto& g = j.at("gcd");
    get(g, "f_max", p.gcd.f_max);
    get(g, "tdp", p.gcd.tdp);
    get(g, "p_idle", p.gcd.p_idle);
    get(g, "peak_flops_at_fmax", p.gcd.peak_flops_at_fmax);
    get(g, "peak_bw_at_fmax", p.gcd.peak_bw_at_fmax);
    get(g, "alpha", p.gcd.alpha);
    get(g, "beta_vai", p.gcd.beta_vai);
    if (g.contains("power_anchors")) {
      p.gcd.power_anchors.clear();
      for (const auto& a : g.at("power_anchors")) p.gcd.power_anchors.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    }
  }
  if (j.contains("mem")) {
    const auto& m = j.at("mem");
    get(m, "l2_size", p.mem.l2_size);
    get(m, "l2_bw_at_fmax", p.mem.l2_bw_at_fmax);
    get(m, "hbm_bw", p.mem.hbm_bw);
    get(m, "core_power_at_fmax", p.mem.core_power_at_fmax);
    get(m, "hbm_extra_power", p.mem.hbm_extra_power);
    get(m, "hbm_bw_floor_cap", p.mem.hbm_bw_floor_cap);
    get(m, "chunk_start", p.mem.chunk_start);
    get(m, "blocks", p.mem.blocks);
    get(m, "threads_per_block", p.mem.threads_per_block);
    get(m, "element_size", p.mem.element_size);
  }
}

// ---------------------------------------------------------------------------
// VAI model
// ---------------------------------------------------------------------------

/// Sustained power at f_max: linear in log2(AI) between anchors, clamped
/// outside them. AI 0 (stream copy) takes the first anchor.
inline double power_at_fmax(double ai, const GcdModelParams& p) {
  const auto& anchors = p.power_anchors;
  if (ai <= anchors.front().ai) return anchors.front().watts;
  if (ai >= anchors.back().ai) return anchors.back().watts;
  const double x = std::log2(ai);
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (ai <= anchors[i].ai) {
      const double x0 = std::log2(anchors[i - 1].ai), x1 = std::log2(anchors[i].ai);
      const double t = (x - x0) / (x1 - x0);
      return anchors[i - 1].watts + t * (anchors[i].watts - anchors[i - 1].watts);
    }
  }
  return anchors.back().watts;
}

inline double power_at(double ai, double f, const GcdModelParams& p) {
  return p.p_idle + (power_at_fmax(ai, p) - p.p_idle) * std::pow(f / p.f_max, p.alpha);
}

/// Highest clock at which power_at(ai, f) fits under `cap_watts`.
inline double power_capped_freq(double ai, double cap_watts, const GcdModelParams& p) {
  if (cap_watts <= p.p_idle) {
    throw Error(ErrorKind::CapBelowIdle, "power cap " + std::to_string(cap_watts) + " W is at or below idle power");
  }
  const double full = power_at_fmax(ai, p);
  if (full <= cap_watts) return p.f_max;
  return p.f_max * std::pow((cap_watts - p.p_idle) / (full - p.p_idle), 1.0 / p.alpha);
}

/// Clock a VAI kernel of intensity `ai` runs at under `cap`.
inline double effective_frequency(double ai, const CapSetting& cap, const GcdModelParams& p) {
  if (auto f = std::get_if<FrequencyCap>(&cap)) return std::min(f->mhz, p.f_max);
  if (auto w = std::get_if<PowerCap>(&cap)) return power_capped_freq(ai, w->watts, p);
  return p.f_max;
}

struct Throughput {
  double flops;      // FLOP/s
  double bandwidth;  // bytes/s
};

/// Roofline at the capped clock. Both roofs follow the clock (compute
/// linearly, memory with exponent beta_vai).
inline Throughput attainable_perf(double ai, const CapSetting& cap, const GcdModelParams& p) {
  if (ai < 0.0) throw Error(ErrorKind::Validation, "arithmetic intensity must be non-negative");
  const double r = effective_frequency(ai, cap, p) / p.f_max;
  const double bw_roof = p.peak_bw_at_fmax * std::pow(r, p.beta_vai);
  const double flops = std::min(p.peak_flops_at_fmax * r, ai * bw_roof);
  return {flops, ai > 0.0 ? flops / ai : bw_roof};
}

struct RooflinePoint {
  double ai = 0.0;
  double frequency = 0.0;
  double perf = 0.0;
  double bandwidth = 0.0;
  double power = 0.0;
  double runtime_norm = 1.0;
  double power_norm = 1.0;
  double energy_norm = 1.0;
};

/// One VAI run under `cap`, normalized to the uncapped run at the same AI.
inline RooflinePoint simulate_vai(double ai, const CapSetting& cap, const GcdModelParams& p) {
  const auto base = attainable_perf(ai, Uncapped{}, p);
  const auto capped = attainable_perf(ai, cap, p);
  RooflinePoint pt;
  pt.ai = ai;
  pt.frequency = effective_frequency(ai, cap, p);
  pt.perf = capped.flops;
  pt.bandwidth = capped.bandwidth;
  pt.power = power_at(ai, pt.frequency, p);
  // fixed work: runtime scales with the inverse rate (bytes for the stream copy)
  pt.runtime_norm = ai > 0.0 ? base.flops / capped.flops : base.bandwidth / capped.bandwidth;
  pt.power_norm = pt.power / power_at(ai, p.f_max, p);
  pt.energy_norm = pt.power_norm * pt.runtime_norm;
  return pt;
}

// ---------------------------------------------------------------------------
// Memory benchmark model
// ---------------------------------------------------------------------------

struct MemoryPoint {
  double data_size = 0.0;
  bool l2_resident = true;
  double frequency = 0.0;
  double bandwidth = 0.0;
  double power = 0.0;
  double runtime_s = 0.0;
  double runtime_norm = 1.0;
  double power_norm = 1.0;
  double energy_norm = 1.0;
};

namespace detail {

struct MemState {
  double frequency;
  double bandwidth;
  double power;
};

inline MemState memory_state(double data_size, const CapSetting& cap, const MemModelParams& mem,
                             const GcdModelParams& gcd) {
  const double core_full = mem.core_power_at_fmax;
  double f = gcd.f_max;
  if (auto fc = std::get_if<FrequencyCap>(&cap)) {
    f = std::min(fc->mhz, gcd.f_max);
  } else if (auto pc = std::get_if<PowerCap>(&cap)) {
    if (pc->watts <= gcd.p_idle) throw Error(ErrorKind::CapBelowIdle, "power cap at or below idle power");
    if (core_full > pc->watts) f = gcd.f_max * std::pow((pc->watts - gcd.p_idle) / (core_full - gcd.p_idle), 1.0 / gcd.alpha);
  }
  const double r = f / gcd.f_max;
  const double core_power = gcd.p_idle + (core_full - gcd.p_idle) * std::pow(r, gcd.alpha);
  if (data_size <= mem.l2_size) return {f, mem.l2_bw_at_fmax * r, core_power};

  double bw = mem.hbm_bw;
  if (auto pc = std::get_if<PowerCap>(&cap); pc && pc->watts < mem.hbm_bw_floor_cap) {
    bw *= (pc->watts - gcd.p_idle) / (mem.hbm_bw_floor_cap - gcd.p_idle);
  }
  return {f, bw, core_power + mem.hbm_extra_power};
}

}  // namespace detail

/// Memory benchmark over a buffer of `data_size` bytes under `cap`.
inline MemoryPoint simulate_mb(double data_size, const CapSetting& cap, const MemModelParams& mem,
                               const GcdModelParams& gcd) {
  if (data_size < mem.chunk_start) throw Error(ErrorKind::Validation, "data size below the first chunk");
  const auto base = detail::memory_state(data_size, Uncapped{}, mem, gcd);
  const auto s = detail::memory_state(data_size, cap, mem, gcd);
  const double bytes = static_cast<double>(mem.blocks * mem.threads_per_block * mem.element_size);
  MemoryPoint pt;
  pt.data_size = data_size;
  pt.l2_resident = data_size <= mem.l2_size;
  pt.frequency = s.frequency;
  pt.bandwidth = s.bandwidth;
  pt.power = s.power;
  pt.runtime_s = bytes / s.bandwidth;
  pt.runtime_norm = base.bandwidth / s.bandwidth;
  pt.power_norm = s.power / base.power;
  pt.energy_norm = pt.power_norm * pt.runtime_norm;
  return pt;
}

// ---------------------------------------------------------------------------
// Characterization table
// ---------------------------------------------------------------------------

struct ClassPercentages {
  double power_pct = 100.0;
  double runtime_pct = 100.0;
  double energy_pct = 100.0;

  /// |energy - power * runtime / 100|
  double identity_gap() const { return std::abs(energy_pct - power_pct * runtime_pct / 100.0); }
};

struct CharacterizationRow {
  CapSetting cap;
  ClassPercentages vai;
  ClassPercentages mb;
};

struct CharacterizationTable {
  std::vector<CharacterizationRow> rows;

  const CharacterizationRow* find(const CapSetting& cap) const {
    for (const auto& r : rows) {
      if (same_cap(r.cap, cap)) return &r;
    }
    // an uncapped request matches whichever baseline row the table has
    if (is_baseline(cap)) {
      for (const auto& r : rows) {
        if (is_baseline(r.cap)) return &r;
      }
    }
    return nullptr;
  }
};

/// Energy-identity tolerance in percentage points.
inline constexpr double kIdentityTolerance = 0.3;

struct IdentityViolation {
  CapSetting cap;
  std::string workload;  // "VAI" or "MB"
  double gap;
};

inline std::vector<IdentityViolation> identity_violations(const CharacterizationTable& t,
                                                          double tolerance = kIdentityTolerance) {
  std::vector<IdentityViolation> out;
  for (const auto& r : t.rows) {
    if (r.vai.identity_gap() > tolerance) out.push_back({r.cap, "VAI", r.vai.identity_gap()});
    if (r.mb.identity_gap() > tolerance) out.push_back({r.cap, "MB", r.mb.identity_gap()});
  }
  return out;
}

/// {0} followed by powers of two from 1/16 to 1024.
inline std::vector<double> default_ai_grid() {
  std::vector<double> g{0.0};
  for (int e = -4; e <= 10; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

/// chunk_start doubled `steps` times (384 KiB .. 384 MiB by default).
inline std::vector<double> default_size_grid(const MemModelParams& mem, int steps = 10) {
  std::vector<double> g;
  for (int i = 0; i <= steps; ++i) g.push_back(std::ldexp(mem.chunk_start, i));
  return g;
}

namespace detail {

// Runtime-weighted average power keeps energy = power x runtime exact for the
// averaged row: mean(energy) / mean(runtime).
template <typename Points>
ClassPercentages average(const Points& pts) {
  double r = 0.0, e = 0.0;
  for (const auto& p : pts) {
    r += p.runtime_norm;
    e += p.energy_norm;
  }
  const double n = static_cast<double>(pts.size());
  return {100.0 * e / r, 100.0 * r / n, 100.0 * e / n};
}

}  // namespace detail

/// Averages the VAI model across `ai_grid` and the memory model across
/// `size_grid` at each cap. Baseline rows are exactly 100/100/100.
inline CharacterizationTable characterize(const std::vector<CapSetting>& caps, const std::vector<double>& ai_grid,
                                          const std::vector<double>& size_grid, const ModelParams& params) {
  if (caps.empty() || ai_grid.empty() || size_grid.empty()) throw Error(ErrorKind::EmptyGrid, "empty cap list or grid");
  params.validate();
  CharacterizationTable t;
  for (const auto& cap : caps) {
    validate(cap);
    CharacterizationRow row{cap, {}, {}};
    if (!is_baseline(cap)) {
      std::vector<RooflinePoint> vai;
      for (double ai : ai_grid) vai.push_back(simulate_vai(ai, cap, params.gcd));
      std::vector<MemoryPoint> mb;
      for (double size : size_grid) mb.push_back(simulate_mb(size, cap, params.mem, params.gcd));
      row.vai = detail::average(vai);
      row.mb = detail::average(mb);
    }
    t.rows.push_back(row);
  }
  return t;
}

inline constexpr std::string_view kCharacterizationHeader =
    "cap_type,cap_value,vai_power_pct,vai_runtime_pct,vai_energy_pct,mb_power_pct,mb_runtime_pct,mb_energy_pct";

inline void write_characterization(std::ostream& out, const CharacterizationTable& t) {
  using delimited::format_exact;
  out << kCharacterizationHeader << '\n';
  for (const auto& r : t.rows) {
    out << cap_type(r.cap) << ',' << format_exact(cap_value(r.cap)) << ',' << format_exact(r.vai.power_pct) << ','
        << format_exact(r.vai.runtime_pct) << ',' << format_exact(r.vai.energy_pct) << ',' << format_exact(r.mb.power_pct)
        << ',' << format_exact(r.mb.runtime_pct) << ',' << format_exact(r.mb.energy_pct) << '\n';
  }
}

struct LoadedTable {
  CharacterizationTable table;
  std::vector<Warning> warnings;
};

/// Reads a characterization file. Rows violating the energy identity by more
/// than 0.3 points produce warnings, not errors.
inline LoadedTable load_characterization(std::istream& in) {
  delimited::LineReader reader(in);
  delimited::expect_header(reader, kCharacterizationHeader);
  LoadedTable out;
  std::string line;
  while (reader.next(line)) {
    const auto f = delimited::split(line);
    const std::size_t ln = reader.line_no();
    if (f.size() != 8) throw ParseError(ln, "expected 8 columns, got " + std::to_string(f.size()));
    const auto value = delimited::parse_double(f[1]);
    if (!value) throw ParseError(ln, "bad cap_value '" + std::string(f[1]) + "'");
    CharacterizationRow row{Uncapped{}, {}, {}};
    try {
      row.cap = make_cap(f[0], *value);
    } catch (const Error& e) {
      throw ParseError(ln, e.what());
    }
    std::array<double, 6> v{};
    for (std::size_t i = 0; i < 6; ++i) {
      const auto d = delimited::parse_double(f[2 + i]);
      if (!d || !std::isfinite(*d) || *d < 0.0) throw ParseError(ln, "bad percentage '" + std::string(f[2 + i]) + "'");
      v[i] = *d;
    }
    row.vai = {v[0], v[1], v[2]};
    row.mb = {v[3], v[4], v[5]};
    out.table.rows.push_back(row);
  }
  for (const auto& viol : identity_violations(out.table)) {
    out.warnings.push_back({Warning::Kind::IdentityViolation,
                            std::string(cap_type(viol.cap)) + " " + delimited::format_exact(cap_value(viol.cap)) + " " +
                                viol.workload + ": energy deviates from power x runtime by " +
                                delimited::format_fixed(viol.gap, 2) + " points"});
  }
  return out;
}

/// Least-squares fit of the power-frequency exponent to the VAI energy column
/// of a measured table's frequency-cap rows (golden-section search on
/// [lo, hi]). Other parameters are held fixed.
inline double fit_alpha(const CharacterizationTable& measured, ModelParams params,
                        const std::vector<double>& ai_grid = default_ai_grid(), double lo = 0.25, double hi = 4.0) {
  std::vector<const CharacterizationRow*> rows;
  for (const auto& r : measured.rows) {
    if (std::holds_alternative<FrequencyCap>(r.cap) && !is_baseline(r.cap)) rows.push_back(&r);
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyGrid, "no frequency-cap rows to fit against");
  auto loss = [&](double alpha) {
    params.gcd.alpha = alpha;
    double sse = 0.0;
    for (const auto* r : rows) {
      double e = 0.0;
      for (double ai : ai_grid) e += simulate_vai(ai, r->cap, params.gcd).energy_norm;
      const double diff = 100.0 * e / static_cast<double>(ai_grid.size()) - r->vai.energy_pct;
      sse += diff * diff;
    }
    return sse;
  };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = loss(c), fd = loss(d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = loss(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = loss(d);
    }
  }
  return (a + b) / 2.0;
}

inline constexpr std::string_view kRooflineHeader = "ai,perf_flops,bandwidth_bps,power_w,runtime_norm,energy_norm";

/// Roofline plot data for one cap level.
inline void write_roofline(std::ostream& out, const std::vector<RooflinePoint>& pts) {
  using delimited::format_exact;
  out << kRooflineHeader << '\n';
  for (const auto& p : pts) {
    out << format_exact(p.ai) << ',' << format_exact(p.perf) << ',' << format_exact(p.bandwidth) << ','
        << format_exact(p.power) << ',' << format_exact(p.runtime_norm) << ',' << format_exact(p.energy_norm) << '\n';
  }
}

}  // namespace gpupower::model
