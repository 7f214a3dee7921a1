#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rabical/artifacts.hpp"
#include "rabical/columnar.hpp"
#include "rabical/config.hpp"
#include "rabical/error.hpp"
#include "rabical/pipeline.hpp"

using namespace rabical;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(RABICAL_TEST_TMP) / "pipeline" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Reduced grids keep these runs quick; the full default grid is exercised by
// the acceptance binary.
PipelineConfig small_config(const fs::path& out, const char* profile) {
  PipelineConfig c = parse_config(json::parse(R"({
    "seed": 4242,
    "sweep": {"amplitudes_mv": {"start": 0, "stop": 200, "step": 2}},
    "channels": [
      {"id": "q1", "qubit": "qubit1", "attenuation": 1.0,
       "amplitudes_mv": {"start": 0, "stop": 500, "step": 5}},
      {"id": "q2", "qubit": "qubit2", "attenuation": 0.8,
       "amplitudes_mv": {"start": 25, "stop": 498, "step": 4.5}}
    ]
  })"));
  c.profile = preset_profile(profile);
  c.output_dir = out;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string err;
};

CliResult cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd =
      std::string(RABICAL_CLI_PATH) + " " + args + " 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(err)};
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

}  // namespace

TEST(Pipeline, IdentityRunShowsOnlyShotNoise) {
  const auto dir = scratch("identity");
  const auto c = small_config(dir, "identity");
  run_pipeline(c, Stage::kAll);
  for (const auto& ch : c.channels) {
    const ColumnTable pre = read_table(dir / percent_error_file(ch, false));
    const double cutoff = low_amplitude_cutoff(ch.qubit);
    for (std::size_t r = 0; r < pre.rows(); ++r) {
      if (pre.number(r, "omega") < cutoff) continue;
      EXPECT_LT(pre.number(r, "percent_error"), 5.0 * pre.number(r, "percent_stderr") + 1e-9)
          << ch.id << " " << pre.number(r, "amplitude_mv");
    }
  }
  const json verify = json::parse(slurp(dir / "verify.json"));
  EXPECT_LT(verify["q1"]["uncorrected_above_cutoff"]["max_percent_error"].get<double>(), 1.0);
}

TEST(Pipeline, StageDependencies) {
  const auto dir = scratch("deps");
  const auto c = small_config(dir, "paper_like");
  EXPECT_THROW(run_pipeline(c, Stage::kCalibrate), MissingInputError);
  EXPECT_THROW(run_pipeline(c, Stage::kExtract), MissingInputError);
  run_pipeline(c, Stage::kSimulate);
  EXPECT_THROW(run_pipeline(c, Stage::kVerify), MissingInputError);
  EXPECT_THROW(emit_plots(c, Figure::kFig4), MissingInputError);
}

TEST(Pipeline, StageIsolationAndReruns) {
  const auto dir = scratch("rerun");
  const auto c = small_config(dir, "paper_like");
  run_pipeline(c, Stage::kSimulate);
  run_pipeline(c, Stage::kExtract);
  const std::string first = slurp(dir / "curve_q1.csv");
  run_pipeline(c, Stage::kExtract);
  EXPECT_EQ(slurp(dir / "curve_q1.csv"), first);
  const std::string manifest = slurp(dir / "manifest.json");
  run_pipeline(c, Stage::kExtract);
  EXPECT_EQ(slurp(dir / "manifest.json"), manifest);
}

TEST(Pipeline, ManifestRegeneratesArtifacts) {
  const auto a = scratch("manifest_a");
  const auto b = scratch("manifest_b");
  run_pipeline(small_config(a, "paper_like"), Stage::kAll);
  const json manifest = json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["tool"], "rabical");
  EXPECT_EQ(manifest["seed"], 4242);
  EXPECT_EQ(manifest["readout_mode_ghz"], 7.0734);
  PipelineConfig again = parse_config(manifest);
  again.output_dir = b;
  run_pipeline(again, Stage::kAll);
  std::size_t checked = 0;
  for (const auto& [stage, entry] : manifest["stages"].items()) {
    for (const auto& [name, digest] : entry["artifacts"].items()) {
      EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
      EXPECT_EQ(fnv1a_hex(slurp(b / name)), digest.get<std::string>()) << name;
      ++checked;
    }
  }
  EXPECT_GT(checked, 30u);
}

TEST(Pipeline, PaperLikeEndToEnd) {
  const auto dir = scratch("paper_like");
  run_pipeline(small_config(dir, "paper_like"), Stage::kAll);
  const json v = json::parse(slurp(dir / "verify.json"));
  EXPECT_GT(v["q1"]["uncorrected"]["max_percent_error"].get<double>(), 10.0);
  EXPECT_LT(v["q1"]["corrected_above_cutoff"]["max_percent_error"].get<double>(), 1.0);
  const json cal = json::parse(slurp(dir / "calibration.json"));
  EXPECT_EQ(cal["overlap"]["q1:q2"].get<double>(), 1.0);
}

TEST(Plots, Fig3dSchemaAndFig2bAgainstModel) {
  const auto dir = scratch("plots");
  const auto c = small_config(dir, "identity");
  run_pipeline(c, Stage::kAll);
  const ColumnTable d = read_table(dir / "fig3d.csv");
  EXPECT_EQ(d.columns(), (std::vector<std::string>{"amplitude", "vc_q1", "band_low_q1",
                                                   "band_high_q1", "vc_q2", "band_low_q2",
                                                   "band_high_q2"}));
  EXPECT_GT(d.rows(), 10u);
  const ColumnTable f = read_table(dir / "fig2b.csv");
  for (std::size_t r = 0; r < f.rows(); ++r) {
    const double model = f.number(r, "p_linear_model");
    const double sigma = std::sqrt(std::max(model * (1 - model), 1e-3) / 1000.0);
    EXPECT_LT(std::abs(f.number(r, "p_measured") - model), 5.0 * sigma) << r;
  }
  for (const auto fig : all_figures()) {
    EXPECT_TRUE(fs::exists(dir / (std::string(figure_name(fig)) + ".csv")));
  }
  EXPECT_TRUE(fs::exists(dir / "fig3c_construction.csv"));
  EXPECT_THROW(parse_figure("fig9"), ConfigError);
  EXPECT_THROW(parse_stage("plot"), ConfigError);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const auto out = dir / "out";
  write_json(dir / "ok.json", json{{"seed", 1}, {"output_dir", out.string()}});
  write_json(dir / "alias.json",
             json{{"seed", 1}, {"durations_us", {{"start", 0}, {"stop", 2}, {"step", 0.02}}}});
  write_json(dir / "noseed.json", json{{"shots", 10}});
  write_json(dir / "flat.json",
             json::parse(R"({"seed": 1, "channels": [{"qubit": "qubit1", "amplitudes_mv": [0, 0.001]}]})"));

  auto r = cli("calibrate --config " + (dir / "ok.json").string(), dir);
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("error=missing_input: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = cli("all --config " + (dir / "noseed.json").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error=config_error: ", 0), 0u) << r.err;

  r = cli("all --config " + (dir / "alias.json").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Nyquist"), std::string::npos) << r.err;

  r = cli("bogus --config " + (dir / "ok.json").string(), dir);
  EXPECT_EQ(r.code, 2);

  r = cli("all --config " + (dir / "flat.json").string() + " --out " + (dir / "flat").string(), dir);
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(r.err.rfind("error=numerical_failure: ", 0), 0u) << r.err;

  std::ofstream(dir / "file_in_the_way") << "x";
  r = cli("simulate --config " + (dir / "ok.json").string() + " --out " +
              (dir / "file_in_the_way").string(),
          dir);
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(r.err.rfind("error=io_error: ", 0), 0u) << r.err;

  r = cli("simulate --config " + (dir / "ok.json").string(), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli("report --config " + (dir / "ok.json").string() + " --figure fig4", dir);
  EXPECT_EQ(r.code, 3) << r.err;
  r = cli("all --config " + (dir / "ok.json").string(), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli("report --config " + (dir / "ok.json").string() + " --figure fig3c", dir);
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli("report --config " + (dir / "ok.json").string() + " --figure fig7", dir);
  EXPECT_EQ(r.code, 2);
}
