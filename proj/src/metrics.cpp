#include "sac/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sac {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::string drop_last_column(const std::string& line) {
  const auto pos = line.rfind(',');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

void write_metrics_header(std::ostream& out) {
  out << "env_step,eval_return_mean,eval_return_min,eval_return_max,"
         "loss_v,loss_q1,loss_q2,loss_pi,policy_entropy,wall_seconds\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  out << r.env_step << ',' << fmt(r.eval_return_mean) << ','
      << fmt(r.eval_return_min) << ',' << fmt(r.eval_return_max) << ','
      << fmt(r.loss_v) << ',' << fmt(r.loss_q1) << ',' << fmt(r.loss_q2) << ','
      << fmt(r.loss_pi) << ',' << fmt(r.policy_entropy) << ','
      << fmt(r.wall_seconds) << '\n';
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_metrics: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_metrics: empty file " + path.string());
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 10)
      throw std::runtime_error("read_metrics: bad row in " + path.string());
    MetricsRow r;
    r.env_step = std::stoull(f[0]);
    r.eval_return_mean = std::stod(f[1]);
    r.eval_return_min = std::stod(f[2]);
    r.eval_return_max = std::stod(f[3]);
    r.loss_v = std::stod(f[4]);
    r.loss_q1 = std::stod(f[5]);
    r.loss_q2 = std::stod(f[6]);
    r.loss_pi = std::stod(f[7]);
    r.policy_entropy = std::stod(f[8]);
    r.wall_seconds = std::stod(f[9]);
    rows.push_back(r);
  }
  return rows;
}

bool metrics_equal_ignoring_wall(const std::filesystem::path& a,
                                 const std::filesystem::path& b) {
  std::ifstream fa(a), fb(b);
  if (!fa || !fb)
    throw std::runtime_error("metrics_equal_ignoring_wall: cannot open input");
  std::string la, lb;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(fa, la));
    const bool gb = static_cast<bool>(std::getline(fb, lb));
    if (ga != gb) return false;
    if (!ga) return true;
    if (drop_last_column(la) != drop_last_column(lb)) return false;
  }
}

std::vector<BandRow> aggregate_seeds(
    const std::vector<std::filesystem::path>& metric_files) {
  if (metric_files.empty())
    throw std::invalid_argument("aggregate_seeds: no input files");
  std::vector<std::vector<MetricsRow>> runs;
  runs.reserve(metric_files.size());
  for (const auto& f : metric_files) runs.push_back(read_metrics(f));
  const std::size_t n = runs[0].size();
  for (const auto& r : runs) {
    if (r.size() != n)
      throw std::runtime_error("aggregate_seeds: misaligned env_step grids");
    for (std::size_t i = 0; i < n; ++i)
      if (r[i].env_step != runs[0][i].env_step)
        throw std::runtime_error("aggregate_seeds: misaligned env_step grids");
  }
  std::vector<BandRow> band(n);
  for (std::size_t i = 0; i < n; ++i) {
    BandRow& b = band[i];
    b.env_step = runs[0][i].env_step;
    b.mean = 0.0;
    b.min = runs[0][i].eval_return_mean;
    b.max = b.min;
    for (const auto& r : runs) {
      const double v = r[i].eval_return_mean;
      b.mean += v;
      b.min = std::min(b.min, v);
      b.max = std::max(b.max, v);
    }
    b.mean /= static_cast<double>(runs.size());
  }
  return band;
}

void write_band(const std::vector<BandRow>& band,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_band: cannot open " + path.string());
  out << "env_step,return_mean,return_min,return_max\n";
  for (const auto& b : band)
    out << b.env_step << ',' << fmt(b.mean) << ',' << fmt(b.min) << ','
        << fmt(b.max) << '\n';
}

std::vector<BandRow> read_band(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_band: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_band: empty file " + path.string());
  std::vector<BandRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error("read_band: bad row in " + path.string());
    rows.push_back(BandRow{std::stoull(f[0]), std::stod(f[1]), std::stod(f[2]),
                           std::stod(f[3])});
  }
  return rows;
}

}  // namespace sac
