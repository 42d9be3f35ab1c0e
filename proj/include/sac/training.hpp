#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sac/config.hpp"

namespace sac {

struct RunPaths {
  std::filesystem::path metrics;     // metrics_seed<N>.csv
  std::filesystem::path checkpoint;  // checkpoint_seed<N>.bin (agent only)
  std::filesystem::path resume;      // resume_seed<N>.bin (full run state)
};
RunPaths run_paths(const std::filesystem::path& out_dir, std::uint64_t seed);

/// Executes Algorithm 1 for one seed: uniform-random warm-up, then one
/// environment step followed by `gradient_steps` train steps, with
/// `eval_episodes` mean-action rollouts every `eval_interval` env steps.
/// Writes the metrics CSV, the final agent checkpoint, and a resume bundle
/// holding buffer, environment and RNG state. With resume = true the run
/// continues from the bundle (the config must match) and appends to the
/// existing metrics file; the result is identical to an uninterrupted run.
/// Returns the metrics file path.
std::filesystem::path run_training(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const std::filesystem::path& out_dir,
                                   bool resume = false);

/// One final-row summary per (axis value, seed).
struct SweepSummaryRow {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  double final_eval_return_mean = 0.0;
  double final_policy_entropy = 0.0;
};

struct SweepResult {
  std::filesystem::path long_csv;     // (axis_value, seed, env_step, ...) rows
  std::filesystem::path summary_csv;  // final row per run
  std::vector<SweepSummaryRow> summary;
};

/// Runs config.seeds x values, one run per pair, parallel up to
/// `max_workers` threads (0 = hardware concurrency). axis is
/// "reward_scale" or "tau".
SweepResult run_sweep(const ExperimentConfig& config, const std::string& axis,
                      const std::vector<double>& values,
                      const std::filesystem::path& out_dir,
                      std::size_t max_workers = 0);

}  // namespace sac
