#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

namespace sac {

/// One evaluation record. CSV columns in this order; wall_seconds is the
/// only column excluded from determinism comparisons.
struct MetricsRow {
  std::uint64_t env_step = 0;
  double eval_return_mean = 0.0;
  double eval_return_min = 0.0;
  double eval_return_max = 0.0;
  double loss_v = 0.0;
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  double loss_pi = 0.0;
  double policy_entropy = 0.0;
  double wall_seconds = 0.0;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

/// Byte comparison after dropping the wall_seconds column from every line.
bool metrics_equal_ignoring_wall(const std::filesystem::path& a,
                                 const std::filesystem::path& b);

/// Per-step mean/min/max of eval_return_mean across seed runs.
struct BandRow {
  std::uint64_t env_step = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Throws if the env_step grids of the input files do not align.
std::vector<BandRow> aggregate_seeds(
    const std::vector<std::filesystem::path>& metric_files);

void write_band(const std::vector<BandRow>& band,
                const std::filesystem::path& path);
std::vector<BandRow> read_band(const std::filesystem::path& path);

}  // namespace sac
