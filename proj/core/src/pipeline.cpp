#include "rabical/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rabical/artifacts.hpp"
#include "rabical/calibration.hpp"
#include "rabical/columnar.hpp"
#include "rabical/error.hpp"
#include "rabical/experiment.hpp"
#include "rabical/fitting.hpp"

#ifndef RABICAL_VERSION
#define RABICAL_VERSION "0.0.0"
#endif

namespace rabical {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags for seed derivation; one per independent source of randomness.
enum SeedTag : std::uint64_t {
  kUncorrectedMap = 1,
  kCorrectedMap = 2,
  kAmplitudeSweep = 3,
  kScope = 4,
};

std::uint64_t id_key(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_seed(const PipelineConfig& c, SeedTag tag, const std::string& id) {
  return derive_seed(c.seed, {tag, id_key(id)});
}

ChannelModel channel_model(const PipelineConfig& c, const ChannelConfig& ch) {
  return ChannelModel{ch.qubit, c.profile, ch.attenuation};
}

class Run {
 public:
  explicit Run(const PipelineConfig& config) : c_(config) {}

  void write(const std::string& name, const std::string& contents) {
    write_file_atomic(c_.output_dir / name, contents);
    written_.emplace_back(name, fnv1a_hex(contents));
  }
  void write(const std::string& name, const ColumnTable& table) {
    write(name, table.to_string());
  }
  void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  ColumnTable table(const std::string& name) const { return read_table(c_.output_dir / name); }
  json document(const std::string& name) const {
    const std::string text = read_file(c_.output_dir / name);
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw IoError(fmt::format("{}: {}", name, e.what()));
    }
  }

  const std::vector<std::pair<std::string, std::string>>& written() const { return written_; }
  const PipelineConfig& config() const { return c_; }

 private:
  const PipelineConfig& c_;
  std::vector<std::pair<std::string, std::string>> written_;
};

LinearModel model_from_json(const json& j) {
  LinearModel m;
  m.slope = j.at("slope").get<double>();
  m.slope_stderr = j.at("slope_stderr").get<double>();
  m.fit_region = {j.at("fit_region_mv").at(0).get<double>(),
                  j.at("fit_region_mv").at(1).get<double>()};
  return m;
}

json summary_to_json(const ErrorSummary& s) {
  return json{{"kept", s.kept},
              {"exceedances", s.exceedances},
              {"max_percent_error", s.max_percent},
              {"max_at_mv", s.max_at_mv}};
}

void stage_simulate(Run& run) {
  const auto& c = run.config();
  run.write("profile.json", json(c.profile));
  for (const auto& ch : c.channels) {
    const ChannelModel model = channel_model(c, ch);
    const SweepGrid grid{ch.amplitudes_mv, c.durations_us, c.shots,
                         stream_seed(c, kUncorrectedMap, ch.id)};
    run.write(map_file(ch, false), map_to_table(run_rabi_map(model, grid)));
    const RabiMap sweep = run_amplitude_sweep(model, c.sweep_amplitudes_mv,
                                              c.sweep_duration_us, c.shots,
                                              stream_seed(c, kAmplitudeSweep, ch.id));
    ColumnTable sweep_table = map_to_table(sweep);
    sweep_table.set_meta("kind", "amplitude_sweep");
    run.write(sweep_file(ch), sweep_table);
  }
  ColumnTable scope({"amplitude_mv", "effective_mv", "measured_mv"});
  scope.set_meta("kind", "scope_measurement");
  scope.set_meta("noise_floor_mv", format_number(c.scope_noise_floor_mv));
  for (const double a : c.sweep_amplitudes_mv) {
    const double effective = apply_distortion(c.profile, a);
    const double measured = scope_measure(
        effective, c.scope_noise_floor_mv, derive_seed(c.seed, {kScope, seed_key(a)}));
    scope.add_numeric_row({a, effective, measured});
  }
  run.write("scope.csv", scope);
}

void write_extraction(Run& run, const ChannelConfig& ch, const RabiMap& map,
                      bool corrected) {
  const CurveExtraction ex = extract_curve(map);
  run.write(curve_file(ch, corrected), curve_to_table(ex.curve));
  run.write(fmt::format("excluded{}_{}.csv", corrected ? "_corrected" : "", ch.id),
            excluded_to_table(ex.excluded, map.qubit_label));
}

void stage_extract(Run& run) {
  for (const auto& ch : run.config().channels) {
    write_extraction(run, ch, map_from_table(run.table(map_file(ch, false))), false);
  }
}

void stage_calibrate(Run& run) {
  const auto& c = run.config();
  json cal{{"channels", json::object()}, {"overlap", json::object()}};
  std::vector<CorrectionTable> tables;
  for (const auto& ch : c.channels) {
    const RabiFrequencyCurve curve = curve_from_table(run.table(curve_file(ch, false)));
    if (curve.size() == 0) {
      throw NumericalError(fmt::format("curve for channel '{}' is empty", ch.id));
    }
    AmplitudeInterval region;
    if (c.fit_region_mv) {
      region = *c.fit_region_mv;
    } else {
      const double lo = curve.amplitudes_mv.front();
      const double span = curve.amplitudes_mv.back() - lo;
      region = {lo + c.fit_low_fraction * span, lo + c.fit_high_fraction * span};
    }
    LinearModel model;
    try {
      model = fit_linear_model(curve, region);
    } catch (const std::invalid_argument& e) {
      throw NumericalError(fmt::format("channel '{}': {}", ch.id, e.what()));
    }
    CorrectionBuild build = build_correction(curve, model, ch.amplitudes_mv, c.epsilon);
    run.write(correction_file(ch), correction_to_table(build.table));

    json excluded = json::array();
    for (const auto& e : build.excluded) {
      excluded.push_back({{"amplitude_mv", e.amplitude_mv}, {"reason", e.reason}});
    }
    cal["channels"][ch.id] = json{
        {"qubit", ch.qubit.label},
        {"slope", model.slope},
        {"slope_stderr", model.slope_stderr},
        {"fit_region_mv", {model.fit_region.low_mv, model.fit_region.high_mv}},
        {"table_points", build.table.size()},
        {"excluded", excluded},
    };
    tables.push_back(std::move(build.table));
  }
  for (std::size_t i = 1; i < tables.size(); ++i) {
    cal["overlap"][fmt::format("{}:{}", c.channels[0].id, c.channels[i].id)] =
        band_overlap(tables[0], tables[i]);
  }
  run.write("calibration.json", cal);
}

void stage_verify(Run& run) {
  const auto& c = run.config();
  const json cal = run.document("calibration.json");
  // A single table, built from the first channel, corrects every channel.
  const CorrectionTable primary =
      correction_from_table(run.table(correction_file(c.channels.front())));
  json summary = json::object();
  for (const auto& ch : c.channels) {
    const LinearModel model = model_from_json(cal.at("channels").at(ch.id));
    const double cutoff = low_amplitude_cutoff(ch.qubit);

    std::vector<double> covered;
    for (const double a : ch.amplitudes_mv) {
      if (primary.covers(a)) covered.push_back(a);
    }
    if (covered.empty()) {
      throw NumericalError(fmt::format(
          "correction table does not cover any amplitude of channel '{}'", ch.id));
    }
    const SweepGrid grid{covered, c.durations_us, c.shots,
                         stream_seed(c, kCorrectedMap, ch.id)};
    const RabiMap corrected_map = run_rabi_map(channel_model(c, ch), grid, primary);
    run.write(map_file(ch, true), map_to_table(corrected_map));
    write_extraction(run, ch, corrected_map, true);

    const RabiFrequencyCurve pre = curve_from_table(run.table(curve_file(ch, false)));
    const RabiFrequencyCurve post = curve_from_table(run.table(curve_file(ch, true)));
    const auto pre_report = percent_error_report(pre, model);
    const auto post_report = percent_error_report(post, model);
    run.write(percent_error_file(ch, false),
              percent_report_to_table(pre_report, ch.qubit.label, false));
    run.write(percent_error_file(ch, true),
              percent_report_to_table(post_report, ch.qubit.label, true));
    summary[ch.id] = json{
        {"omega_cutoff", cutoff},
        {"uncorrected", summary_to_json(summarize_errors(pre_report, 0.0, 1.0))},
        {"uncorrected_above_cutoff", summary_to_json(summarize_errors(pre_report, cutoff, 1.0))},
        {"corrected_above_cutoff", summary_to_json(summarize_errors(post_report, cutoff, 1.0))},
    };
  }
  run.write("verify.json", summary);
}

// ----- plot data -----------------------------------------------------------

std::string figure_file(Figure f) { return fmt::format("{}.csv", figure_name(f)); }

void emit_fig2b(Run& run) {
  const auto& c = run.config();
  const auto& ch = c.channels.front();
  const RabiMap sweep = map_from_table(run.table(sweep_file(ch)));
  ColumnTable t({"amplitude_mv", "p_measured", "p_stderr", "p_linear_model"});
  t.set_meta("kind", "fig2b");
  t.set_meta("qubit", ch.qubit.label);
  t.set_meta("duration_us", format_number(sweep.grid.durations_us.front()));
  const double tau = sweep.grid.durations_us.front();
  for (std::size_t i = 0; i < sweep.rows(); ++i) {
    const double a = sweep.grid.amplitudes_mv[i];
    const double p = sweep.at(i, 0);
    const double omega_linear = ch.qubit.rabi_rate_per_mv * ch.attenuation * a;
    t.add_numeric_row({a, p, std::sqrt(p * (1.0 - p) / static_cast<double>(sweep.grid.shots)),
                       ideal_excited_probability(omega_linear, tau).value()});
  }
  run.write(figure_file(Figure::kFig2b), t);
}

void emit_map_figure(Run& run, Figure f, bool corrected) {
  const auto& ch = run.config().channels.front();
  const RabiMap map = map_from_table(run.table(map_file(ch, corrected)));
  ColumnTable t({"amplitude_mv", "duration_us", "p_estimate"});
  t.set_meta("kind", figure_name(f));
  t.set_meta("qubit", ch.qubit.label);
  t.set_meta("corrected", corrected ? "1" : "0");
  for (std::size_t i = 0; i < map.rows(); ++i) {
    const double a = map.grid.amplitudes_mv[i];
    if (a > 250.0) break;
    for (std::size_t j = 0; j < map.cols(); ++j) {
      t.add_numeric_row({a, map.grid.durations_us[j], map.at(i, j)});
    }
  }
  run.write(figure_file(f), t);
}

void emit_fig3c(Run& run) {
  const auto& c = run.config();
  const json cal = run.document("calibration.json");
  ColumnTable points({"channel", "amplitude_mv", "omega", "stderr", "model_omega"});
  points.set_meta("kind", "fig3c");
  ColumnTable construction(
      {"channel", "a_c_mv", "target_omega", "a_o_mv", "omega_at_a_o", "omega_at_a_c"});
  construction.set_meta("kind", "fig3c_construction");
  for (const auto& ch : c.channels) {
    const RabiFrequencyCurve curve = curve_from_table(run.table(curve_file(ch, false)));
    const LinearModel model = model_from_json(cal.at("channels").at(ch.id));
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double a = curve.amplitudes_mv[i];
      points.add_row({ch.id, format_number(a), format_number(curve.omegas[i]),
                      format_number(curve.stderrs[i]), format_number(model.omega(a))});
    }
    const double a_c = 130.0;
    const double target = model.omega(a_c);
    const auto [lo, hi] = std::minmax_element(curve.omegas.begin(), curve.omegas.end());
    if (curve.amplitudes_mv.front() <= a_c && a_c <= curve.amplitudes_mv.back() &&
        target >= *lo && target <= *hi) {
      const double a_o = invert_amplitude(curve, target);
      construction.add_row({ch.id, format_number(a_c), format_number(target),
                            format_number(a_o), format_number(interpolate_curve(curve, a_o)),
                            format_number(interpolate_curve(curve, a_c))});
    }
  }
  run.write(figure_file(Figure::kFig3c), points);
  run.write("fig3c_construction.csv", construction);
}

void emit_fig3d(Run& run) {
  const auto& c = run.config();
  std::vector<CorrectionTable> tables;
  std::vector<std::string> columns{"amplitude"};
  for (const auto& ch : c.channels) {
    tables.push_back(correction_from_table(run.table(correction_file(ch))));
    for (const char* prefix : {"vc_", "band_low_", "band_high_"}) {
      columns.push_back(prefix + ch.id);
    }
  }
  double lo = tables.front().min_amplitude();
  double hi = tables.front().max_amplitude();
  for (const auto& t : tables) {
    lo = std::max(lo, t.min_amplitude());
    hi = std::min(hi, t.max_amplitude());
  }
  ColumnTable out(columns);
  out.set_meta("kind", "fig3d");
  out.set_meta("band_units", "vc_factor");
  out.set_meta("epsilon", format_number(c.epsilon));
  for (const double a : tables.front().amplitudes_mv) {
    if (a < lo || a > hi) continue;
    std::vector<double> row{a};
    for (const auto& t : tables) {
      const auto& xs = t.amplitudes_mv;
      auto it = std::lower_bound(xs.begin(), xs.end(), a);
      const auto i = static_cast<std::size_t>(it - xs.begin());
      double low, high;
      if (*it == a) {
        low = t.band_low_mv[i];
        high = t.band_high_mv[i];
      } else {
        const double w = (a - xs[i - 1]) / (xs[i] - xs[i - 1]);
        low = t.band_low_mv[i - 1] + w * (t.band_low_mv[i] - t.band_low_mv[i - 1]);
        high = t.band_high_mv[i - 1] + w * (t.band_high_mv[i] - t.band_high_mv[i - 1]);
      }
      row.push_back(correction_factor(t, a));
      row.push_back(low / a);
      row.push_back(high / a);
    }
    out.add_numeric_row(row);
  }
  run.write(figure_file(Figure::kFig3d), out);
}

void emit_fig4(Run& run) {
  const auto& ch = run.config().channels.front();
  const ColumnTable pre = run.table(percent_error_file(ch, false));
  const ColumnTable post = run.table(percent_error_file(ch, true));
  std::map<double, std::pair<double, double>> joined;
  for (std::size_t r = 0; r < pre.rows(); ++r) {
    joined[pre.number(r, "amplitude_mv")] = {pre.number(r, "percent_error"), kNaN};
  }
  for (std::size_t r = 0; r < post.rows(); ++r) {
    auto [it, inserted] = joined.try_emplace(post.number(r, "amplitude_mv"), kNaN, kNaN);
    it->second.second = post.number(r, "percent_error");
  }
  ColumnTable out({"amplitude_mv", "percent_error_uncorrected", "percent_error_corrected"});
  out.set_meta("kind", "fig4");
  out.set_meta("qubit", ch.qubit.label);
  for (const auto& [a, v] : joined) {
    out.add_numeric_row({a, v.first, v.second});
  }
  run.write(figure_file(Figure::kFig4), out);
}

void emit(Run& run, Figure f) {
  switch (f) {
    case Figure::kFig2b:
      return emit_fig2b(run);
    case Figure::kFig3a:
      return emit_map_figure(run, f, false);
    case Figure::kFig3b:
      return emit_map_figure(run, f, true);
    case Figure::kFig3c:
      return emit_fig3c(run);
    case Figure::kFig3d:
      return emit_fig3d(run);
    case Figure::kFig4:
      return emit_fig4(run);
  }
}

void stage_report(Run& run) {
  for (const Figure f : all_figures()) emit(run, f);
  json report{{"calibration", run.document("calibration.json")},
              {"verification", run.document("verify.json")}};
  run.write("report.json", report);
}

void prepare_output(const PipelineConfig& c) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec || !fs::is_directory(c.output_dir)) {
    throw IoError(fmt::format("output directory {} is not writable", c.output_dir.string()));
  }
}

void update_manifest(const PipelineConfig& c, const std::string& stage, const Run& run) {
  const fs::path path = c.output_dir / "manifest.json";
  const std::string hash = config_hash(c);
  json manifest;
  if (fs::exists(path)) {
    try {
      manifest = json::parse(read_file(path));
    } catch (const json::exception&) {
      manifest = json::object();
    }
    if (!manifest.is_object() || manifest.value("config_hash", "") != hash) {
      manifest = json::object();
    }
  }
  manifest["tool"] = "rabical";
  manifest["version"] = RABICAL_VERSION;
  manifest["config_hash"] = hash;
  manifest["seed"] = c.seed;
  manifest["readout_mode_ghz"] = kReadoutModeGhz;
  manifest["config"] = config_to_json(c);
  json artifacts = json::object();
  for (const auto& [name, digest] : run.written()) artifacts[name] = digest;
  manifest["stages"][stage] = json{{"artifacts", artifacts}};
  write_file_atomic(path, manifest.dump(2) + "\n");
}

void run_stage(const PipelineConfig& c, Stage s, StageOutcome& out) {
  Run run(c);
  switch (s) {
    case Stage::kSimulate:
      stage_simulate(run);
      break;
    case Stage::kExtract:
      stage_extract(run);
      break;
    case Stage::kCalibrate:
      stage_calibrate(run);
      break;
    case Stage::kVerify:
      stage_verify(run);
      break;
    case Stage::kReport:
      stage_report(run);
      break;
    case Stage::kAll:
      return;
  }
  update_manifest(c, stage_name(s), run);
  for (const auto& [name, digest] : run.written()) out.artifacts.push_back(c.output_dir / name);
}

}  // namespace

Stage parse_stage(std::string_view name) {
  for (const Stage s : {Stage::kSimulate, Stage::kExtract, Stage::kCalibrate,
                        Stage::kVerify, Stage::kReport, Stage::kAll}) {
    if (name == stage_name(s)) return s;
  }
  throw ConfigError(fmt::format(
      "unknown stage '{}' (valid: simulate, extract, calibrate, verify, report, all)", name));
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kSimulate:
      return "simulate";
    case Stage::kExtract:
      return "extract";
    case Stage::kCalibrate:
      return "calibrate";
    case Stage::kVerify:
      return "verify";
    case Stage::kReport:
      return "report";
    case Stage::kAll:
      return "all";
  }
  return "?";
}

Figure parse_figure(std::string_view name) {
  for (const Figure f : all_figures()) {
    if (name == figure_name(f)) return f;
  }
  throw ConfigError(fmt::format(
      "unknown figure '{}' (valid: fig2b, fig3a, fig3b, fig3c, fig3d, fig4)", name));
}

const char* figure_name(Figure figure) {
  switch (figure) {
    case Figure::kFig2b:
      return "fig2b";
    case Figure::kFig3a:
      return "fig3a";
    case Figure::kFig3b:
      return "fig3b";
    case Figure::kFig3c:
      return "fig3c";
    case Figure::kFig3d:
      return "fig3d";
    case Figure::kFig4:
      return "fig4";
  }
  return "?";
}

std::vector<Figure> all_figures() {
  return {Figure::kFig2b, Figure::kFig3a, Figure::kFig3b,
          Figure::kFig3c, Figure::kFig3d, Figure::kFig4};
}

StageOutcome run_pipeline(const PipelineConfig& config, Stage stage) {
  config.validate();
  prepare_output(config);
  StageOutcome out;
  if (stage == Stage::kAll) {
    for (const Stage s : {Stage::kSimulate, Stage::kExtract, Stage::kCalibrate,
                          Stage::kVerify, Stage::kReport}) {
      run_stage(config, s, out);
    }
  } else {
    run_stage(config, stage, out);
  }
  return out;
}

std::vector<fs::path> emit_plots(const PipelineConfig& config, Figure figure) {
  config.validate();
  prepare_output(config);
  Run run(config);
  emit(run, figure);
  std::vector<fs::path> out;
  for (const auto& [name, digest] : run.written()) out.push_back(config.output_dir / name);
  return out;
}

std::string map_file(const ChannelConfig& ch, bool corrected) {
  return fmt::format("map{}_{}.csv", corrected ? "_corrected" : "", ch.id);
}

std::string curve_file(const ChannelConfig& ch, bool corrected) {
  return fmt::format("curve{}_{}.csv", corrected ? "_corrected" : "", ch.id);
}

std::string correction_file(const ChannelConfig& ch) {
  return fmt::format("correction_{}.csv", ch.id);
}

std::string percent_error_file(const ChannelConfig& ch, bool corrected) {
  return fmt::format("errors_{}_{}.csv", corrected ? "post" : "pre", ch.id);
}

std::string sweep_file(const ChannelConfig& ch) { return fmt::format("sweep_{}.csv", ch.id); }

double low_amplitude_cutoff(const SimulatedQubit& qubit) { return 20.0 / qubit.t1_us; }

}  // namespace rabical
