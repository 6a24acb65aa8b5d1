#pragma once

#include <filesystem>
#include <string>

#include "blowup/config.hpp"
#include "blowup/wavesolver.hpp"

namespace blowup::runio {

/// Base output directory: BLOWUPLAB_OUT env var, else the configured one.
std::filesystem::path output_root(const config::ExperimentConfig& cfg);

/// Writes runs/<hash>/{config.json, series.csv, record.json}; returns the
/// run directory.  Identical configs map to the identical directory and
/// bit-identical file contents.
std::filesystem::path write_run(const config::ExperimentConfig& cfg,
                                const wave::RunRecord& rec);

/// Loads a record written by write_run; `dir` may be the run directory or
/// a bare hash under the configured output root.
wave::RunRecord load_run(const std::filesystem::path& dir);

bool run_exists(const std::filesystem::path& dir);

std::string series_csv(const wave::RunRecord& rec);
std::string record_json(const wave::RunRecord& rec);
wave::RunRecord record_from_json(const std::string& text);

} // namespace blowup::runio
