#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rabical/config.hpp"
#include "rabical/error.hpp"
#include "rabical/pipeline.hpp"

namespace {

int fail(const char* cls, int code, const std::string& message) {
  // Single line on stderr: error=<class>: <message>
  std::string flat = message;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  fmt::print(stderr, "error={}: {}\n", cls, flat);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rabi-map based calibration of generator amplitude nonlinearity"};
  std::string stage_arg;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> figure_arg;
  app.add_option("stage", stage_arg, "simulate | extract | calibrate | verify | report | all")
      ->required();
  app.add_option("--config", config_path, "pipeline config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--figure", figure_arg,
                 "emit one figure's plot data: fig2b fig3a fig3b fig3c fig3d fig4");
  app.set_version_flag("--version", RABICAL_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config_error", 2, e.what());
  }

  try {
    const rabical::Stage stage = rabical::parse_stage(stage_arg);
    std::optional<rabical::Figure> figure;
    if (figure_arg) figure = rabical::parse_figure(*figure_arg);

    rabical::PipelineConfig config = rabical::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;

    // `report --figure X` emits just that figure; for other stages the
    // figure is emitted after the stage completes.
    if (!(stage == rabical::Stage::kReport && figure)) {
      rabical::run_pipeline(config, stage);
    }
    if (figure) rabical::emit_plots(config, *figure);
    return 0;
  } catch (const rabical::PipelineError& e) {
    return fail(rabical::error_class_name(e.error_class()),
                rabical::exit_code_for(e.error_class()), e.what());
  } catch (const std::exception& e) {
    return fail("numerical_failure", 4, e.what());
  }
}
