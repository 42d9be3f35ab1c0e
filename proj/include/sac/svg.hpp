#pragma once

#include <filesystem>
#include <vector>

#include "sac/metrics.hpp"

namespace sac {

/// Axis limits covering [lo, hi] with a 5% margin on each side (a fixed
/// pad when the range is degenerate).
struct AxisLimits {
  double lo = 0.0;
  double hi = 1.0;
};
AxisLimits axis_limits(double lo, double hi);

/// Renders a mean line with a min-max band as a self-contained SVG.
/// Emitted element subset: svg, rect, line, polyline, polygon, circle,
/// text. A single-row table produces one circle marker and no band
/// polygon. The raw table is written next to the SVG with a ".csv"
/// extension.
void emit_plot(const std::vector<BandRow>& band,
               const std::filesystem::path& svg_path);

}  // namespace sac
