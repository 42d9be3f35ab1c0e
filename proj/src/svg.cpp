#include "sac/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sac {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 52.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

AxisLimits axis_limits(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  double span = hi - lo;
  if (span == 0.0) span = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
  return AxisLimits{lo - 0.05 * span, hi + 0.05 * span};
}

void emit_plot(const std::vector<BandRow>& band,
               const std::filesystem::path& svg_path) {
  if (band.empty()) throw std::invalid_argument("emit_plot: empty band table");

  double xlo = static_cast<double>(band.front().env_step);
  double xhi = xlo, ylo = band.front().min, yhi = band.front().max;
  for (const auto& b : band) {
    xlo = std::min(xlo, static_cast<double>(b.env_step));
    xhi = std::max(xhi, static_cast<double>(b.env_step));
    ylo = std::min(ylo, b.min);
    yhi = std::max(yhi, b.max);
  }
  const AxisLimits xa = axis_limits(xlo, xhi);
  const AxisLimits ya = axis_limits(ylo, yhi);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) {
    return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w;
  };
  auto sy = [&](double y) {
    return kMarginTop + (ya.hi - y) / (ya.hi - ya.lo) * plot_h;
  };

  std::ofstream out(svg_path);
  if (!out)
    throw std::runtime_error("emit_plot: cannot open " + svg_path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";

  // Axes.
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
      << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\""
      << kMarginTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop
      << "\" x2=\"" << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
      << "\" stroke=\"black\"/>\n";

  // Ticks and labels, five per axis.
  for (int i = 0; i <= 4; ++i) {
    const double fx = xa.lo + (xa.hi - xa.lo) * i / 4.0;
    const double fy = ya.lo + (ya.hi - ya.lo) * i / 4.0;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << kMarginTop + plot_h
        << "\" x2=\"" << sx(fx) << "\" y2=\"" << kMarginTop + plot_h + 5
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(fx)
        << "</text>\n";
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << sy(fy)
        << "\" x2=\"" << kMarginLeft << "\" y2=\"" << sy(fy)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << sy(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
      << kHeight - 12 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << "environment steps</text>\n";
  out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kMarginTop + plot_h / 2 << ")\">evaluation return</text>\n";

  if (band.size() == 1) {
    out << "<circle cx=\"" << sx(static_cast<double>(band[0].env_step))
        << "\" cy=\"" << sy(band[0].mean)
        << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  } else {
    // Min-max band polygon: forward along max, back along min.
    out << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" "
           "points=\"";
    for (const auto& b : band)
      out << num(sx(static_cast<double>(b.env_step))) << ","
          << num(sy(b.max)) << " ";
    for (auto it = band.rbegin(); it != band.rend(); ++it)
      out << num(sx(static_cast<double>(it->env_step))) << ","
          << num(sy(it->min)) << " ";
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
           "points=\"";
    for (const auto& b : band)
      out << num(sx(static_cast<double>(b.env_step))) << ","
          << num(sy(b.mean)) << " ";
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_plot: write failed");

  std::filesystem::path table_path = svg_path;
  table_path.replace_extension(".csv");
  write_band(band, table_path);
}

}  // namespace sac
