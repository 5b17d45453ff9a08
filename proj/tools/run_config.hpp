#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fcodt/evaluation.hpp"

namespace fcodt::cli {

/// Experiment settings plus where to find data and where to write results.
///
/// JSON keys (all optional; unknown keys are rejected):
///   methods, datasets, depths, sample_sizes, repeats, lambda_grid, seed,
///   folds, sim_train, sim_test, sim_sigma, sim_bench_n, train_fraction,
///   retune_lambda, minmax_scale, workers, manifest, output_dir, reference,
///   criteria: {max_depth, min_samples_split, min_samples_leaf, min_gain}
/// Defaults: K = 4, min_samples_split = 20, min_samples_leaf = 8, min_gain = 0,
/// lambda grid {1e-4, ..., 1000}, 10 repeats, 5 folds, one worker.
struct RunConfig {
  ExperimentConfig experiment;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> reference;
};

/// Relative paths inside the file resolve against the file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Canonical JSON of the effective settings; its hash is stamped into outputs.
std::string canonical_json(const RunConfig& config);

}  // namespace fcodt::cli
