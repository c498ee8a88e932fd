// gpupower: telemetry ingestion, modal decomposition, cap characterization
// and energy-savings projection.
//
// Exit codes: 0 success, 1 validation error, 2 I/O or parse error, 64 usage.

#include <gpupower/gpupower.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using namespace gpupower;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

const char* const kFormats = R"(File formats (comma-separated, one header line, no quoting):
  raw telemetry     timestamp,node_id,input_power_w,cpu_power_w,gcd0_w,...,gcd7_w
                    timestamp: epoch seconds or ISO-8601 UTC (2023-11-14T22:13:20Z)
  window file       same columns; timestamps are 15-s window starts (ingest output)
  scheduler         job_id,project_id,num_nodes,begin_time,end_time   (end exclusive)
  allocations       job_id,node_id
  job summary       job_id,science_domain,job_size_class,gpu_energy_mwh,gpu_hours
  histogram         bin_start_w,count
  decomposition     mode,sample_count,gpu_hours,energy_mwh,hours_pct,energy_pct
    sliced          domain,size_class,mode,sample_count,gpu_hours,energy_mwh,hours_pct,energy_pct
  characterization  cap_type,cap_value,vai_power_pct,vai_runtime_pct,vai_energy_pct,
                    mb_power_pct,mb_runtime_pct,mb_energy_pct
  roofline          ai,perf_flops,bandwidth_bps,power_w,runtime_norm,energy_norm
  projection        cap_type,cap_value,ci_mwh,mi_mwh,total_mwh,savings_pct,delta_t_pct,savings_pct_dt0
  heatmap           domain,size_class,energy_mwh,savings_mwh
  synth spec        JSON: seed, node_count, duration_s, start_time, cadence_s, idle_power_w,
                    cpu_power_w [lo,hi], other_power_w, mode_ranges {Mode: [lo,hi]}, interleaved,
                    jobs [{job_id, domain, project_id, size_class, first_node, num_nodes,
                           begin_offset_s, duration_s, mixture {Mode: fraction}}]
  model params      JSON: {"gcd": {...}, "mem": {...}}; missing keys keep the Frontier defaults
Cap lists: freq:1500,1300  power:500,300  freq:1700..700 (step 200)  power:560..200:60  none
Modes: LatencyBound, MemoryIntensive, ComputeIntensive, Boosted.
CSV reports print MWh to 2 decimals and percentages to 1; JSON carries full precision.
--config FILE reads a JSON object whose keys are long option names, either at the top level
or under a section named after the subcommand; command-line flags take precedence.
GPUPOWER_OUTPUT_DIR, when set, is prepended to relative output paths.)";

// ---------------------------------------------------------------------------
// I/O helpers
// ---------------------------------------------------------------------------

fs::path output_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("GPUPOWER_OUTPUT_DIR"); dir && *dir) path = fs::path(dir) / path;
  }
  return path;
}

std::ifstream open_in(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + p);
  return in;
}

/// Writes to `target` (stdout when empty) through a string buffer so a failed
/// run leaves no partial file.
void emit(const std::string& target, const std::string& content) {
  if (target.empty() || target == "-") {
    std::cout << content;
    return;
  }
  const auto path = output_path(target);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void report(const std::vector<Warning>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w.message << '\n';
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto f : delimited::split(s)) {
    const auto t = delimited::trim(f);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

double number(std::string_view s, const std::string& what) {
  const auto v = delimited::parse_double(delimited::trim(s));
  if (!v) throw CLI::ValidationError(what, "'" + std::string(s) + "' is not a number");
  return *v;
}

/// "freq:1500,1300", "power:560..200:60", "freq:1700..700", "none".
std::vector<CapSetting> parse_caps(const std::vector<std::string>& specs) {
  std::vector<CapSetting> caps;
  for (const auto& spec : specs) {
    if (spec == "none") {
      caps.push_back(Uncapped{});
      continue;
    }
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--caps", "expected TYPE:VALUES, got '" + spec + "'");
    const std::string type = spec.substr(0, colon);
    if (type != "freq" && type != "power") throw CLI::ValidationError("--caps", "unknown cap type '" + type + "'");
    for (const auto& item : split_list(spec.substr(colon + 1))) {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        caps.push_back(make_cap(type, number(item, "--caps")));
        continue;
      }
      const double from = number(item.substr(0, dots), "--caps");
      std::string rest = item.substr(dots + 2);
      double step = type == "freq" ? 200.0 : 100.0;
      if (const auto c = rest.find(':'); c != std::string::npos) {
        step = number(rest.substr(c + 1), "--caps");
        rest = rest.substr(0, c);
      }
      const double to = number(rest, "--caps");
      if (!(step > 0.0)) throw CLI::ValidationError("--caps", "range step must be positive");
      const double dir = to < from ? -1.0 : 1.0;
      for (double v = from; dir * (to - v) >= -1e-9; v += dir * step) caps.push_back(make_cap(type, v));
    }
  }
  return caps;
}

ModeThresholds parse_thresholds(const std::string& s, const std::string& ties) {
  ModeThresholds t;
  if (!s.empty()) {
    const auto f = split_list(s);
    if (f.size() != 3) throw CLI::ValidationError("--thresholds", "expected t_low,t_mid,t_tdp");
    t.t_low = number(f[0], "--thresholds");
    t.t_mid = number(f[1], "--thresholds");
    t.t_tdp = number(f[2], "--thresholds");
  }
  if (ties == "upper") {
    t.low_tie_upper = t.mid_tie_upper = t.tdp_tie_upper = true;
  } else if (ties == "lower") {
    t.low_tie_upper = t.mid_tie_upper = t.tdp_tie_upper = false;
  } else if (ties != "default") {
    throw CLI::ValidationError("--ties", "expected default, upper or lower");
  }
  return validate(t);
}

SliceFilter parse_filter(const std::string& domains, const std::string& sizes) {
  SliceFilter f;
  for (const auto& d : split_list(domains)) f.domains.insert(d);
  for (const auto& s : split_list(sizes)) {
    const auto c = parse_size_class(s);
    if (!c) throw CLI::ValidationError("--sizes", "unknown size class '" + s + "'");
    f.sizes.insert(*c);
  }
  return f;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw CLI::ValidationError("--format", "expected csv or json");
}

/// Fills options the command line left unset from the config document:
/// the subcommand's section first, then top-level keys.
void apply_config(CLI::App& sub, const json& config) {
  for (auto* opt : sub.get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    const json* value = nullptr;
    if (config.contains(sub.get_name()) && config[sub.get_name()].is_object() && config[sub.get_name()].contains(name)) {
      value = &config[sub.get_name()][name];
    } else if (config.contains(name) && !config[name].is_object()) {
      value = &config[name];
    }
    if (!value) continue;
    auto as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value->is_array()) {
      for (const auto& v : *value) opt->add_result(as_text(v));
    } else if (value->is_boolean()) {
      if (!value->get<bool>()) continue;
      opt->add_result("true");
    } else {
      opt->add_result(as_text(*value));
    }
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// JSON mirrors
// ---------------------------------------------------------------------------

json decomposition_json(const ModalDecomposition& d) {
  auto modes = json::array();
  for (auto m : kAllModes) {
    const auto& s = d[m];
    modes.push_back({{"mode", to_string(m)},
                     {"sample_count", s.sample_count},
                     {"gpu_hours", s.gpu_hours},
                     {"energy_mwh", s.energy_mwh},
                     {"hours_pct", s.hours_pct},
                     {"energy_pct", s.energy_pct}});
  }
  return {{"modes", modes},
          {"total_samples", d.total_samples},
          {"total_gpu_hours", d.total_gpu_hours},
          {"total_energy_mwh", d.total_energy_mwh}};
}

json characterization_json(const model::CharacterizationTable& t) {
  auto rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"cap_type", cap_type(r.cap)},
                    {"cap_value", cap_value(r.cap)},
                    {"vai_power_pct", r.vai.power_pct},
                    {"vai_runtime_pct", r.vai.runtime_pct},
                    {"vai_energy_pct", r.vai.energy_pct},
                    {"mb_power_pct", r.mb.power_pct},
                    {"mb_runtime_pct", r.mb.runtime_pct},
                    {"mb_energy_pct", r.mb.energy_pct}});
  }
  return rows;
}

json job_summary_json(const std::vector<JobEnergySummary>& rows) {
  auto arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"job_id", r.job_id},
                   {"science_domain", r.science_domain},
                   {"job_size_class", r.job_size_class ? std::string(to_string(*r.job_size_class)) : std::string("-")},
                   {"gpu_energy_mwh", r.gpu_energy_mwh},
                   {"gpu_hours", r.gpu_hours}});
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Shared loaders
// ---------------------------------------------------------------------------

model::ModelParams load_params(const std::string& path) {
  model::ModelParams p;
  if (!path.empty()) {
    auto in = open_in(path);
    p = json::parse(in).get<model::ModelParams>();
  }
  p.validate();
  return p;
}

model::CharacterizationTable load_table(const std::string& path) {
  auto in = open_in(path);
  auto loaded = model::load_characterization(in);
  report(loaded.warnings);
  return loaded.table;
}

struct Schedule {
  std::vector<JobRecord> jobs;
};

Schedule load_schedule(const std::string& sched, const std::string& alloc, const ingest::ParseOptions& opts) {
  auto s = open_in(sched);
  auto parsed = ingest::parse_scheduler(s, opts);
  report(parsed.warnings);
  auto a = open_in(alloc);
  auto allocs = ingest::parse_allocations(a, opts);
  report(allocs.warnings);
  report(ingest::join_allocations(parsed.rows, allocs.rows));
  return {std::move(parsed.rows)};
}

std::vector<AggregatedSample> load_windows(const std::string& path, const ingest::ParseOptions& opts) {
  auto in = open_in(path);
  return ingest::parse_aggregated(in, opts);
}

/// Sliced files are merged unless a filter asks for specific slices.
std::map<SliceKey, ModalDecomposition> load_decomposition(const std::string& path) {
  auto in = open_in(path);
  return read_decomposition(in);
}

std::vector<CapSetting> caps_or_table(const std::vector<std::string>& specs, const model::CharacterizationTable& t) {
  if (!specs.empty()) return parse_caps(specs);
  std::vector<CapSetting> caps;
  for (const auto& r : t.rows) {
    if (!is_baseline(r.cap)) caps.push_back(r.cap);
  }
  if (caps.empty()) throw Error(ErrorKind::Validation, "no cap levels requested and the table has only baseline rows");
  return caps;
}

std::string cap_file_name(const CapSetting& cap) {
  return "roofline_" + std::string(cap_type(cap)) + "_" + delimited::format_exact(cap_value(cap)) + ".csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPU power telemetry analysis and cap-savings projection"};
  app.footer(kFormats);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option defaults");

  std::string out, format = "csv";
  bool lenient = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--out", out, "output file (stdout when omitted)");
    sub->add_flag("--lenient", lenient, "skip malformed input rows with a warning");
  };

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic telemetry, scheduler and allocation files");
  std::string spec_path, out_dir = ".", synth_table;
  std::vector<std::string> caps_spec;
  synth_cmd->add_option("--spec", spec_path, "synth spec JSON");
  synth_cmd->add_option("--out-dir", out_dir, "directory for telemetry.csv, scheduler.csv, allocations.csv, expected.json");
  synth_cmd->add_option("--table", synth_table, "characterization file for the oracle projection");
  synth_cmd->add_option("--caps", caps_spec, "cap levels for the oracle projection");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "aggregate raw telemetry into 15-s windows");
  std::string telemetry_path;
  ingest_cmd->add_option("--telemetry", telemetry_path, "raw telemetry file");
  common(ingest_cmd);

  // join
  auto* join_cmd = app.add_subcommand("join", "attribute window samples to jobs; writes the job summary");
  std::string windows_path, scheduler_path, allocations_path;
  join_cmd->add_option("--windows", windows_path, "window file from ingest");
  join_cmd->add_option("--scheduler", scheduler_path, "scheduler file");
  join_cmd->add_option("--allocations", allocations_path, "allocation file");
  join_cmd->add_option("--format", format, "csv or json");
  common(join_cmd);

  // decompose
  auto* decompose_cmd = app.add_subcommand("decompose", "split GCD samples into operating modes");
  std::string thresholds, ties = "default", slice = "none", histogram_path;
  double bin_width = 5.0;
  decompose_cmd->add_option("--windows", windows_path, "window file from ingest");
  decompose_cmd->add_option("--scheduler", scheduler_path, "scheduler file (needed for slicing)");
  decompose_cmd->add_option("--allocations", allocations_path, "allocation file (needed for slicing)");
  decompose_cmd->add_option("--thresholds", thresholds, "t_low,t_mid,t_tdp in watts (default 200,420,560)");
  decompose_cmd->add_option("--ties", ties, "boundary ties: default, upper or lower");
  decompose_cmd->add_option("--slice", slice, "none, domain or domain-size");
  decompose_cmd->add_option("--histogram", histogram_path, "also write the power histogram here");
  decompose_cmd->add_option("--bin-width", bin_width, "histogram bin width in watts");
  decompose_cmd->add_option("--format", format, "csv or json");
  common(decompose_cmd);

  // characterize
  auto* char_cmd = app.add_subcommand("characterize", "model VAI and memory benchmarks under cap levels");
  std::string params_path, roofline_dir, fit_table;
  char_cmd->add_option("--caps", caps_spec, "cap levels");
  char_cmd->add_option("--params", params_path, "model parameter JSON");
  char_cmd->add_option("--roofline-dir", roofline_dir, "write one roofline file per cap level here");
  char_cmd->add_option("--fit-alpha", fit_table, "fit the power-frequency exponent to this measured table first");
  char_cmd->add_option("--format", format, "csv or json");
  common(char_cmd);

  // project
  auto* project_cmd = app.add_subcommand("project", "project energy savings from a decomposition and a table");
  std::string decomposition_path, table_path, domains, sizes, dt_weights;
  project_cmd->add_option("--decomposition", decomposition_path, "decomposition file (flat or sliced)");
  project_cmd->add_option("--table", table_path, "characterization file");
  project_cmd->add_option("--caps", caps_spec, "cap levels (default: every non-baseline table row)");
  project_cmd->add_option("--domains", domains, "restrict to these science domains (sliced input)");
  project_cmd->add_option("--sizes", sizes, "restrict to these size classes A-E (sliced input)");
  project_cmd->add_option("--dt-weights", dt_weights, "w_ci,w_mi for the runtime estimate (default: energy shares)");
  project_cmd->add_option("--format", format, "csv or json");
  common(project_cmd);

  // report
  auto* report_cmd = app.add_subcommand("report", "domain x size-class heatmap and hot-domain selection");
  std::string cap_text;
  double threshold = 0.0;
  bool large_only = false;
  report_cmd->add_option("--decomposition", decomposition_path, "decomposition sliced by domain-size");
  report_cmd->add_option("--table", table_path, "characterization file");
  report_cmd->add_option("--cap", cap_text, "single cap level, e.g. freq:900");
  report_cmd->add_option("--domains", domains, "restrict to these science domains");
  report_cmd->add_option("--sizes", sizes, "restrict to these size classes");
  report_cmd->add_option("--threshold", threshold, "hot-cell savings threshold in MWh");
  report_cmd->add_flag("--large-only", large_only, "hot cells only among size classes A, B and C");
  report_cmd->add_option("--format", format, "csv or json");
  common(report_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!config_path.empty()) {
      auto in = open_in(config_path);
      const auto config = json::parse(in);
      if (!config.is_object()) throw Error(ErrorKind::Parse, "config must be a JSON object");
      apply_config(*sub, config);
    }
    check_format(format);
    const ingest::ParseOptions opts{.lenient = lenient};

    if (sub == synth_cmd) {
      require(spec_path, "--spec");
      auto in = open_in(spec_path);
      const auto spec = synth::parse_spec(json::parse(in));
      std::ostringstream t, s, a;
      synth::generate(spec, t, s, a);
      const auto expected = synth::oracle(spec);
      std::vector<synth::ExpectedSavings> savings;
      if (!synth_table.empty()) {
        const auto table = load_table(synth_table);
        std::vector<synth::CapEnergyPct> pct;
        for (const auto& cap : caps_or_table(caps_spec, table)) {
          const auto* row = table.find(cap);
          if (!row) throw Error(ErrorKind::MissingCapRow, "table has no row for " + std::string(cap_type(cap)));
          pct.push_back({std::string(cap_type(cap)), cap_value(cap), row->vai.energy_pct, row->mb.energy_pct});
        }
        savings = synth::oracle_savings(expected.system, pct);
      }
      const fs::path dir(out_dir);
      emit((dir / "telemetry.csv").string(), t.str());
      emit((dir / "scheduler.csv").string(), s.str());
      emit((dir / "allocations.csv").string(), a.str());
      emit((dir / "expected.json").string(), dump(synth::to_json(expected, savings)));
    } else if (sub == ingest_cmd) {
      require(telemetry_path, "--telemetry");
      auto in = open_in(telemetry_path);
      const auto parsed = ingest::parse_telemetry(in, opts);
      report(parsed.warnings);
      if (parsed.skipped) std::cerr << "skipped " << parsed.skipped << " malformed rows\n";
      const auto windows = ingest::aggregate_15s(parsed.rows);
      emit(out, render([&](std::ostream& o) { ingest::write_telemetry(o, windows); }));
    } else if (sub == join_cmd) {
      require(windows_path, "--windows");
      require(scheduler_path, "--scheduler");
      require(allocations_path, "--allocations");
      const auto sched = load_schedule(scheduler_path, allocations_path, opts);
      const auto joined = join(load_windows(windows_path, opts), sched.jobs);
      report(joined.warnings);
      const auto rows = summarize(joined, sched.jobs);
      emit(out, format == "json" ? dump(job_summary_json(rows))
                                 : render([&](std::ostream& o) { write_job_summary(o, rows); }));
    } else if (sub == decompose_cmd) {
      require(windows_path, "--windows");
      const auto t = parse_thresholds(thresholds, ties);
      const auto windows = load_windows(windows_path, opts);
      if (!histogram_path.empty()) {
        const auto h = histogram(windows, bin_width);
        emit(histogram_path, render([&](std::ostream& o) { write_histogram(o, h); }));
      }
      if (slice == "none") {
        const auto d = decompose(windows, t);
        emit(out, format == "json" ? dump(decomposition_json(d))
                                   : render([&](std::ostream& o) { write_decomposition(o, d); }));
      } else if (slice == "domain" || slice == "domain-size") {
        require(scheduler_path, "--scheduler");
        require(allocations_path, "--allocations");
        const auto sched = load_schedule(scheduler_path, allocations_path, opts);
        const auto joined = join(windows, sched.jobs);
        report(joined.warnings);
        const auto slices =
            decompose_sliced(joined, sched.jobs, slice == "domain" ? SliceBy::Domain : SliceBy::DomainSize, t);
        if (format == "json") {
          auto arr = json::array();
          for (const auto& [key, d] : slices) {
            auto j = decomposition_json(d);
            j["domain"] = key.domain;
            j["size_class"] = size_label(key);
            arr.push_back(j);
          }
          emit(out, dump(arr));
        } else {
          emit(out, render([&](std::ostream& o) { write_decomposition(o, slices); }));
        }
      } else {
        throw CLI::ValidationError("--slice", "expected none, domain or domain-size");
      }
    } else if (sub == char_cmd) {
      auto params = load_params(params_path);
      const auto caps = caps_spec.empty() ? parse_caps({"freq:1700..700"}) : parse_caps(caps_spec);
      if (!fit_table.empty()) {
        params.gcd.alpha = model::fit_alpha(load_table(fit_table), params);
        std::cerr << "fitted alpha " << delimited::format_fixed(params.gcd.alpha, 4) << '\n';
      }
      const auto ai_grid = model::default_ai_grid();
      const auto table = model::characterize(caps, ai_grid, model::default_size_grid(params.mem), params);
      if (!roofline_dir.empty()) {
        for (const auto& cap : caps) {
          std::vector<model::RooflinePoint> pts;
          for (double ai : ai_grid) pts.push_back(model::simulate_vai(ai, cap, params.gcd));
          emit((fs::path(roofline_dir) / cap_file_name(cap)).string(),
               render([&](std::ostream& o) { model::write_roofline(o, pts); }));
        }
      }
      emit(out, format == "json" ? dump(characterization_json(table))
                                 : render([&](std::ostream& o) { model::write_characterization(o, table); }));
    } else if (sub == project_cmd) {
      require(decomposition_path, "--decomposition");
      require(table_path, "--table");
      const auto table = load_table(table_path);
      const auto caps = caps_or_table(caps_spec, table);
      std::optional<DeltaTWeights> weights;
      if (!dt_weights.empty()) {
        const auto f = split_list(dt_weights);
        if (f.size() != 2) throw CLI::ValidationError("--dt-weights", "expected w_ci,w_mi");
        weights = DeltaTWeights{number(f[0], "--dt-weights"), number(f[1], "--dt-weights")};
      }
      const auto slices = load_decomposition(decomposition_path);
      const auto filter = parse_filter(domains, sizes);
      const auto rows = filtered_projection(slices, table, caps, filter, weights);
      emit(out, format == "json" ? dump(projection_json(rows))
                                 : render([&](std::ostream& o) { write_projection_csv(o, rows); }));
    } else if (sub == report_cmd) {
      require(decomposition_path, "--decomposition");
      require(table_path, "--table");
      require(cap_text, "--cap");
      const auto caps = parse_caps({cap_text});
      if (caps.size() != 1) throw CLI::ValidationError("--cap", "expected exactly one cap level");
      const auto table = load_table(table_path);
      const auto slices = load_decomposition(decomposition_path);
      const auto filter = parse_filter(domains, sizes);
      filtered_energies(slices, filter);  // rejects unknown domains and sizes
      auto h = heatmap(slices, table, caps[0]);
      std::erase_if(h.cells, [&](const auto& kv) { return !filter.selects(kv.first); });
      const auto hot = select_hot_cells(h, threshold, large_only);
      std::string hot_list;
      for (const auto& d : hot) hot_list += (hot_list.empty() ? "" : ",") + d;
      std::cerr << "total energy " << delimited::format_fixed(h.total_energy(), 2) << " MWh, savings "
                << delimited::format_fixed(h.total_savings(), 2) << " MWh, hot domains: " << hot_list << '\n';
      if (format == "json") {
        emit(out, dump({{"cap_type", cap_type(h.cap)},
                        {"cap_value", cap_value(h.cap)},
                        {"cells", heatmap_json(h)},
                        {"total_energy_mwh", h.total_energy()},
                        {"total_savings_mwh", h.total_savings()},
                        {"hot_domains", hot}}));
      } else {
        emit(out, render([&](std::ostream& o) { write_heatmap_csv(o, h); }));
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Io ? kExitIo : kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
