#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rabical/config.hpp"

namespace rabical {

enum class Stage { kSimulate, kExtract, kCalibrate, kVerify, kReport, kAll };

// Throws ConfigError for unknown names.
Stage parse_stage(std::string_view name);
const char* stage_name(Stage stage);

enum class Figure { kFig2b, kFig3a, kFig3b, kFig3c, kFig3d, kFig4 };

Figure parse_figure(std::string_view name);
const char* figure_name(Figure figure);
std::vector<Figure> all_figures();

struct StageOutcome {
  std::vector<std::filesystem::path> artifacts;
};

// Runs one stage (or all, in order) and updates <output_dir>/manifest.json.
// Throws MissingInputError when a stage's inputs are absent, ConfigError for
// invalid configs, NumericalError when fitting yields nothing usable, and
// IoError when the output directory is not writable.
StageOutcome run_pipeline(const PipelineConfig& config, Stage stage);

// Writes <output_dir>/<figure>.csv (plus companions for fig3c) from existing
// artifacts. Throws MissingInputError when they are absent.
std::vector<std::filesystem::path> emit_plots(const PipelineConfig& config, Figure figure);

// Artifact names within the output directory.
std::string map_file(const ChannelConfig& ch, bool corrected);
std::string curve_file(const ChannelConfig& ch, bool corrected);
std::string correction_file(const ChannelConfig& ch);
std::string percent_error_file(const ChannelConfig& ch, bool corrected);
std::string sweep_file(const ChannelConfig& ch);

// Rabi-frequency floor below which percent errors are not assessed: 20 / T1.
double low_amplitude_cutoff(const SimulatedQubit& qubit);

}  // namespace rabical
