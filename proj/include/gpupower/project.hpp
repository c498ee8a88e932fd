#pragma once

/// @file project.hpp
/// @brief Upper-bound energy-savings projection: applies a characterization
/// table's energy percentages to the compute- and memory-intensive energy of
/// a modal decomposition.
///
/// For a cap L:
///   ci    = E_CI * (1 - vai_energy_pct(L) / 100)
///   mi    = E_MI * (1 - mb_energy_pct(L) / 100)
///   total = ci + mi                     (regional terms may be negative)
///   savings_pct     = total / E_total * 100
///   savings_pct_dt0 = mi / E_total * 100
/// Latency-bound and boosted energy is never projected.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>
#include <gpupower/gpumodel.hpp>
#include <gpupower/modal.hpp>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace gpupower {

struct RegionEnergies {
  double ci_mwh = 0.0;
  double mi_mwh = 0.0;
  double total_mwh = 0.0;
};

inline RegionEnergies region_energies(const ModalDecomposition& d) {
  return {d[OperatingMode::ComputeIntensive].energy_mwh, d[OperatingMode::MemoryIntensive].energy_mwh,
          d.total_energy_mwh};
}

struct ProjectionRow {
  CapSetting cap = Uncapped{};
  double ci_savings_mwh = 0.0;
  double mi_savings_mwh = 0.0;
  double total_savings_mwh = 0.0;
  double savings_pct = 0.0;
  double delta_t_pct = 0.0;
  double savings_pct_dt0 = 0.0;
};

/// Region weights of the runtime-penalty estimate.
struct DeltaTWeights {
  double ci = 0.0;
  double mi = 0.0;
};

namespace detail {

inline const model::CharacterizationRow& require_row(const model::CharacterizationTable& t, const CapSetting& cap) {
  const auto* row = t.find(cap);
  if (!row) {
    throw Error(ErrorKind::MissingCapRow, "characterization table has no row for " + std::string(cap_type(cap)) + " " +
                                              delimited::format_exact(cap_value(cap)));
  }
  return *row;
}

inline double share(double part, double total) { return total != 0.0 ? part / total : 0.0; }

}  // namespace detail

/// Weighted runtime increase over the uncapped run:
/// sum_r w_r * max(0, runtime_pct_r(L) - 100). Default weights are each
/// region's share of total energy.
inline double estimate_delta_t(const RegionEnergies& e, const model::CharacterizationTable& table, const CapSetting& cap,
                               std::optional<DeltaTWeights> weights = std::nullopt) {
  const auto& row = detail::require_row(table, cap);
  const DeltaTWeights w = weights.value_or(DeltaTWeights{detail::share(e.ci_mwh, e.total_mwh), detail::share(e.mi_mwh, e.total_mwh)});
  return w.ci * std::max(0.0, row.vai.runtime_pct - 100.0) + w.mi * std::max(0.0, row.mb.runtime_pct - 100.0);
}

inline ProjectionRow project_row(const RegionEnergies& e, const model::CharacterizationTable& table,
                                 const CapSetting& cap, std::optional<DeltaTWeights> weights = std::nullopt) {
  const auto& row = detail::require_row(table, cap);
  ProjectionRow p;
  p.cap = cap;
  p.ci_savings_mwh = e.ci_mwh * (1.0 - row.vai.energy_pct / 100.0);
  p.mi_savings_mwh = e.mi_mwh * (1.0 - row.mb.energy_pct / 100.0);
  p.total_savings_mwh = p.ci_savings_mwh + p.mi_savings_mwh;
  p.savings_pct = detail::share(p.total_savings_mwh, e.total_mwh) * 100.0;
  p.savings_pct_dt0 = detail::share(p.mi_savings_mwh, e.total_mwh) * 100.0;
  p.delta_t_pct = estimate_delta_t(e, table, cap, weights);
  return p;
}

inline std::vector<ProjectionRow> project_savings(const RegionEnergies& e, const model::CharacterizationTable& table,
                                                  const std::vector<CapSetting>& caps,
                                                  std::optional<DeltaTWeights> weights = std::nullopt) {
  std::vector<ProjectionRow> out;
  out.reserve(caps.size());
  for (const auto& cap : caps) out.push_back(project_row(e, table, cap, weights));
  return out;
}

inline std::vector<ProjectionRow> project_savings(const ModalDecomposition& d, const model::CharacterizationTable& table,
                                                  const std::vector<CapSetting>& caps,
                                                  std::optional<DeltaTWeights> weights = std::nullopt) {
  return project_savings(region_energies(d), table, caps, weights);
}

// ---------------------------------------------------------------------------
// Filtered projections
// ---------------------------------------------------------------------------

struct SliceFilter {
  std::set<std::string> domains;     // empty: every domain
  std::set<JobSizeClass> sizes;      // empty: every size class

  bool empty() const { return domains.empty() && sizes.empty(); }
  bool selects(const SliceKey& k) const {
    if (!domains.empty() && !domains.contains(k.domain)) return false;
    if (!sizes.empty() && (!k.size_class || !sizes.contains(*k.size_class))) return false;
    return true;
  }
};

/// Region energies of the selected slices, with E_total kept at the
/// unfiltered total so percentages stay comparable to the system-wide ones.
inline RegionEnergies filtered_energies(const std::map<SliceKey, ModalDecomposition>& slices, const SliceFilter& filter) {
  for (const auto& d : filter.domains) {
    const bool known = std::any_of(slices.begin(), slices.end(), [&](const auto& kv) { return kv.first.domain == d; });
    if (!known) throw Error(ErrorKind::UnknownDomain, "no slice for domain '" + d + "'");
  }
  for (const auto s : filter.sizes) {
    const bool known = std::any_of(slices.begin(), slices.end(), [&](const auto& kv) { return kv.first.size_class == s; });
    if (!known) throw Error(ErrorKind::UnknownSize, "no slice for size class " + std::string(to_string(s)));
  }
  RegionEnergies e;
  for (const auto& [key, d] : slices) {
    e.total_mwh += d.total_energy_mwh;
    if (!filter.selects(key)) continue;
    e.ci_mwh += d[OperatingMode::ComputeIntensive].energy_mwh;
    e.mi_mwh += d[OperatingMode::MemoryIntensive].energy_mwh;
  }
  return e;
}

inline std::vector<ProjectionRow> filtered_projection(const std::map<SliceKey, ModalDecomposition>& slices,
                                                      const model::CharacterizationTable& table,
                                                      const std::vector<CapSetting>& caps, const SliceFilter& filter,
                                                      std::optional<DeltaTWeights> weights = std::nullopt) {
  return project_savings(filtered_energies(slices, filter), table, caps, weights);
}

// ---------------------------------------------------------------------------
// Heatmap
// ---------------------------------------------------------------------------

struct HeatmapCell {
  double energy_mwh = 0.0;
  double savings_mwh = 0.0;
};

struct HeatmapReport {
  CapSetting cap = Uncapped{};
  std::map<SliceKey, HeatmapCell> cells;

  double total_energy() const {
    double s = 0.0;
    for (const auto& [_, c] : cells) s += c.energy_mwh;
    return s;
  }
  double total_savings() const {
    double s = 0.0;
    for (const auto& [_, c] : cells) s += c.savings_mwh;
    return s;
  }
};

/// Energy used and projected savings at `cap` for every (domain, size) slice.
inline HeatmapReport heatmap(const std::map<SliceKey, ModalDecomposition>& slices,
                             const model::CharacterizationTable& table, const CapSetting& cap) {
  HeatmapReport h;
  h.cap = cap;
  for (const auto& [key, d] : slices) {
    const auto row = project_row(region_energies(d), table, cap);
    h.cells[key] = {d.total_energy_mwh, row.total_savings_mwh};
  }
  return h;
}

inline bool is_large(JobSizeClass c) { return c == JobSizeClass::A || c == JobSizeClass::B || c == JobSizeClass::C; }

/// Domains with at least one cell saving >= threshold_mwh, optionally looking
/// only at size classes A, B and C. Sorted by name.
inline std::vector<std::string> select_hot_cells(const HeatmapReport& h, double threshold_mwh, bool large_only = false) {
  if (threshold_mwh < 0.0) throw Error(ErrorKind::Validation, "threshold must be non-negative");
  std::set<std::string> hot;
  for (const auto& [key, cell] : h.cells) {
    if (large_only && (!key.size_class || !is_large(*key.size_class))) continue;
    // zero-savings cells never qualify, so threshold 0 selects "any savings"
    if (cell.savings_mwh > 0.0 && cell.savings_mwh >= threshold_mwh) hot.insert(key.domain);
  }
  return {hot.begin(), hot.end()};
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

inline constexpr std::string_view kProjectionHeader =
    "cap_type,cap_value,ci_mwh,mi_mwh,total_mwh,savings_pct,delta_t_pct,savings_pct_dt0";
inline constexpr std::string_view kHeatmapHeader = "domain,size_class,energy_mwh,savings_mwh";

/// Presentation CSV: MWh to 2 decimals, percentages to 1.
inline void write_projection_csv(std::ostream& out, const std::vector<ProjectionRow>& rows) {
  using delimited::format_fixed;
  out << kProjectionHeader << '\n';
  for (const auto& r : rows) {
    out << cap_type(r.cap) << ',' << delimited::format_exact(cap_value(r.cap)) << ',' << format_fixed(r.ci_savings_mwh, 2)
        << ',' << format_fixed(r.mi_savings_mwh, 2) << ',' << format_fixed(r.total_savings_mwh, 2) << ','
        << format_fixed(r.savings_pct, 1) << ',' << format_fixed(r.delta_t_pct, 1) << ','
        << format_fixed(r.savings_pct_dt0, 1) << '\n';
  }
}

inline nlohmann::json projection_json(const std::vector<ProjectionRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"cap_type", cap_type(r.cap)},
                   {"cap_value", cap_value(r.cap)},
                   {"ci_mwh", r.ci_savings_mwh},
                   {"mi_mwh", r.mi_savings_mwh},
                   {"total_mwh", r.total_savings_mwh},
                   {"savings_pct", r.savings_pct},
                   {"delta_t_pct", r.delta_t_pct},
                   {"savings_pct_dt0", r.savings_pct_dt0}});
  }
  return arr;
}

inline std::string size_label(const SliceKey& k) {
  return k.size_class ? std::string(to_string(*k.size_class)) : std::string("-");
}

inline void write_heatmap_csv(std::ostream& out, const HeatmapReport& h) {
  using delimited::format_fixed;
  out << kHeatmapHeader << '\n';
  for (const auto& [key, c] : h.cells) {
    out << key.domain << ',' << size_label(key) << ',' << format_fixed(c.energy_mwh, 2) << ','
        << format_fixed(c.savings_mwh, 2) << '\n';
  }
}

inline nlohmann::json heatmap_json(const HeatmapReport& h) {
  auto arr = nlohmann::json::array();
  for (const auto& [key, c] : h.cells) {
    arr.push_back({{"domain", key.domain}, {"size_class", size_label(key)}, {"energy_mwh", c.energy_mwh}, {"savings_mwh", c.savings_mwh}});
  }
  return arr;
}

}  // namespace gpupower
