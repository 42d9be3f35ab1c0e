#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <filesystem>
#include <string>

#include "sac/agent.hpp"
#include "sac/config.hpp"
#include "sac/metrics.hpp"
#include "sac/svg.hpp"
#include "sac/training.hpp"

using namespace sac;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

// Small, fast run used by the loop-mechanics tests.
ExperimentConfig tiny_pendulum() {
  ExperimentConfig c = ExperimentConfig::defaults_for("pendulum");
  c.max_episode_steps = 50;
  c.hidden_sizes = {8, 8};
  c.batch_size = 32;
  c.buffer_capacity = 2000;
  c.total_env_steps = 600;
  c.eval_interval = 200;
  c.eval_episodes = 2;
  c.warmup_steps = 100;
  c.seeds = {1, 2};
  return c;
}

std::size_t count_occurrences(const std::string& text,
                              const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config: env defaults and file overrides") {
  ExperimentConfig pendulum = ExperimentConfig::defaults_for("pendulum");
  CHECK(pendulum.reward_scale == 5.0);
  CHECK(pendulum.resolved_gradient_steps() == 1);
  CHECK(pendulum.resolved_target_update_interval() == 1);

  const fs::path dir = fresh_dir("sac_cfg_test");
  write_file(dir / "a.cfg",
             "# pendulum experiment\n"
             "env = pendulum\n"
             "reward_scale = 2.5   # overrides the task default\n"
             "hidden_sizes = 32,32\n"
             "seeds = 7, 8, 9\n"
             "variant = soft_hard_target\n");
  ExperimentConfig c = ExperimentConfig::load(dir / "a.cfg");
  CHECK(c.env == "pendulum");
  CHECK(c.reward_scale == 2.5);
  CHECK(c.hidden_sizes == std::vector<std::size_t>{32, 32});
  CHECK(c.seeds == std::vector<std::uint64_t>{7, 8, 9});
  CHECK(c.variant == AgentVariant::kSoftHardTarget);
  CHECK(c.resolved_gradient_steps() == 4);
  CHECK(c.resolved_target_update_interval() == 1000);
  // Other keys keep the pendulum defaults.
  CHECK(c.total_env_steps == 50000);
  fs::remove_all(dir);
}

TEST_CASE("config: unknown keys, bad values and missing env are rejected") {
  const fs::path dir = fresh_dir("sac_cfg_bad");
  write_file(dir / "unknown.cfg", "env = pendulum\nlearning_rate = 1\n");
  CHECK_THROWS_WITH_AS(ExperimentConfig::load(dir / "unknown.cfg"),
                       doctest::Contains("unknown key"), std::runtime_error);
  write_file(dir / "badnum.cfg", "env = pendulum\nlr = fast\n");
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "badnum.cfg"),
                  std::runtime_error);
  write_file(dir / "noenv.cfg", "lr = 1e-3\n");
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "noenv.cfg"),
                  std::runtime_error);
  write_file(dir / "badenv.cfg", "env = humanoid\n");
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "badenv.cfg"),
                  std::runtime_error);
  write_file(dir / "noval.cfg", "env = pendulum\ntau =\n");
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "noval.cfg"),
                  std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("config: save/load round-trip") {
  const fs::path dir = fresh_dir("sac_cfg_rt");
  ExperimentConfig c = tiny_pendulum();
  c.save(dir / "c.cfg");
  ExperimentConfig back = ExperimentConfig::load(dir / "c.cfg");
  CHECK(back.env == c.env);
  CHECK(back.hidden_sizes == c.hidden_sizes);
  CHECK(back.total_env_steps == c.total_env_steps);
  CHECK(back.seeds == c.seeds);
  CHECK(back.reward_scale == c.reward_scale);
  fs::remove_all(dir);
}

TEST_CASE("metrics: aggregate examples") {
  const fs::path dir = fresh_dir("sac_agg");
  auto write_metrics = [&](const std::string& name,
                           const std::vector<double>& returns) {
    std::ofstream out(dir / name);
    write_metrics_header(out);
    for (std::size_t i = 0; i < returns.size(); ++i) {
      MetricsRow r;
      r.env_step = 100 * (i + 1);
      r.eval_return_mean = returns[i];
      write_metrics_row(out, r);
    }
  };
  write_metrics("m1.csv", {1.0, 5.0});
  write_metrics("m2.csv", {2.0, 4.0});
  write_metrics("m3.csv", {3.0, 3.0});

  SUBCASE("single file: mean == min == max") {
    auto band = aggregate_seeds({dir / "m1.csv"});
    REQUIRE(band.size() == 2);
    CHECK(band[0].mean == 1.0);
    CHECK(band[0].min == 1.0);
    CHECK(band[0].max == 1.0);
  }
  SUBCASE("three files: mean, min, max per step") {
    auto band =
        aggregate_seeds({dir / "m1.csv", dir / "m2.csv", dir / "m3.csv"});
    REQUIRE(band.size() == 2);
    CHECK(band[0].mean == doctest::Approx(2.0));
    CHECK(band[0].min == 1.0);
    CHECK(band[0].max == 3.0);
    CHECK(band[1].mean == doctest::Approx(4.0));
  }
  SUBCASE("misaligned grids are rejected") {
    write_metrics("short.csv", {1.0});
    CHECK_THROWS_AS(aggregate_seeds({dir / "m1.csv", dir / "short.csv"}),
                    std::runtime_error);
  }
  fs::remove_all(dir);
}

TEST_CASE("axis limits add a 5% margin") {
  AxisLimits lim = axis_limits(0.0, 100.0);
  CHECK(lim.lo == doctest::Approx(-5.0));
  CHECK(lim.hi == doctest::Approx(105.0));
  AxisLimits degenerate = axis_limits(3.0, 3.0);
  CHECK(degenerate.lo < 3.0);
  CHECK(degenerate.hi > 3.0);
}

TEST_CASE("emit_plot: single point gets a marker, bands get polygons") {
  const fs::path dir = fresh_dir("sac_svg");
  std::vector<BandRow> single{{1000, -150.0, -170.0, -130.0}};
  emit_plot(single, dir / "one.svg");
  const std::string one = slurp(dir / "one.svg");
  CHECK(count_occurrences(one, "<circle") == 1);
  CHECK(count_occurrences(one, "<polygon") == 0);
  CHECK(count_occurrences(one, "<polyline") == 0);
  CHECK(fs::exists(dir / "one.csv"));  // raw table beside the plot

  std::vector<BandRow> band;
  for (int i = 0; i < 5; ++i)
    band.push_back(BandRow{static_cast<std::uint64_t>(1000 * (i + 1)),
                           -300.0 + 40.0 * i, -325.0 + 40.0 * i,
                           -275.0 + 40.0 * i});
  emit_plot(band, dir / "band.svg");
  const std::string text = slurp(dir / "band.svg");
  CHECK(count_occurrences(text, "<polyline") == 1);
  CHECK(count_occurrences(text, "<polygon") == 1);
  CHECK(count_occurrences(text, "<circle") == 0);
  auto table = read_band(dir / "band.csv");
  REQUIRE(table.size() == band.size());
  CHECK(table[2].mean == band[2].mean);
  fs::remove_all(dir);
}

TEST_CASE("emit_plot: structure matches the committed golden file") {
  // Same synthetic five-row band the golden was generated from.
  std::vector<BandRow> band;
  for (int i = 0; i < 5; ++i)
    band.push_back(BandRow{static_cast<std::uint64_t>(1000 * (i + 1)),
                           -300.0 + 40.0 * i, -325.0 + 40.0 * i,
                           -275.0 + 40.0 * i});
  const fs::path dir = fresh_dir("sac_svg_golden");
  emit_plot(band, dir / "fresh.svg");
  const std::string fresh = slurp(dir / "fresh.svg");
  const std::string golden =
      slurp(fs::path(TEST_DATA_DIR) / "golden_band.svg");
  for (const std::string element :
       {"<svg", "<rect", "<line", "<polyline", "<polygon", "<circle",
        "<text"})
    CHECK(count_occurrences(fresh, element) ==
          count_occurrences(golden, element));
  fs::remove_all(dir);
}

TEST_CASE("run_training: zero steps produce a header and a checkpoint") {
  const fs::path dir = fresh_dir("sac_run0");
  ExperimentConfig c = tiny_pendulum();
  c.total_env_steps = 0;
  const fs::path metrics = run_training(c, 1, dir);
  CHECK(read_metrics(metrics).empty());
  const std::string text = slurp(metrics);
  CHECK(count_occurrences(text, "env_step,") == 1);
  Agent agent = load_agent(run_paths(dir, 1).checkpoint);
  CHECK(agent.gradient_steps == 0);
  CHECK(agent.config.state_dim == 3);
  fs::remove_all(dir);
}

TEST_CASE("run_training: byte-identical reruns apart from wall time") {
  const fs::path d1 = fresh_dir("sac_det1");
  const fs::path d2 = fresh_dir("sac_det2");
  ExperimentConfig c = tiny_pendulum();
  const fs::path m1 = run_training(c, 1, d1);
  const fs::path m2 = run_training(c, 1, d2);
  CHECK(metrics_equal_ignoring_wall(m1, m2));
  // Different seed must differ.
  const fs::path d3 = fresh_dir("sac_det3");
  const fs::path m3 = run_training(c, 2, d3);
  CHECK_FALSE(metrics_equal_ignoring_wall(m1, m3));
  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
}

TEST_CASE("run_training: evaluation cadence and gradient-step accounting") {
  const fs::path dir = fresh_dir("sac_protocol");
  ExperimentConfig c = tiny_pendulum();
  c.gradient_steps = 2;
  const fs::path metrics = run_training(c, 3, dir);
  auto rows = read_metrics(metrics);
  REQUIRE(rows.size() == c.total_env_steps / c.eval_interval);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].env_step == (i + 1) * c.eval_interval);
  Agent agent = load_agent(run_paths(dir, 3).checkpoint);
  CHECK(agent.gradient_steps ==
        (c.total_env_steps - c.warmup_steps) * c.gradient_steps);
  fs::remove_all(dir);
}

TEST_CASE("run_training: resume reproduces the uninterrupted run") {
  const fs::path full_dir = fresh_dir("sac_resume_full");
  const fs::path split_dir = fresh_dir("sac_resume_split");
  ExperimentConfig c = tiny_pendulum();

  const fs::path full = run_training(c, 5, full_dir);

  ExperimentConfig first_half = c;
  first_half.total_env_steps = 300;
  run_training(first_half, 5, split_dir);
  const fs::path resumed = run_training(c, 5, split_dir, /*resume=*/true);

  CHECK(metrics_equal_ignoring_wall(full, resumed));
  Agent a = load_agent(run_paths(full_dir, 5).checkpoint);
  Agent b = load_agent(run_paths(split_dir, 5).checkpoint);
  REQUIRE(a.policy.tensors.size() == b.policy.tensors.size());
  for (std::size_t i = 0; i < a.policy.tensors.size(); ++i)
    CHECK(a.policy.tensors[i].data == b.policy.tensors[i].data);
  for (std::size_t i = 0; i < a.v.tensors.size(); ++i)
    CHECK(a.v.tensors[i].data == b.v.tensors[i].data);
  CHECK(a.gradient_steps == b.gradient_steps);
  fs::remove_all(full_dir);
  fs::remove_all(split_dir);
}

TEST_CASE("run_training: resume without a bundle fails cleanly") {
  const fs::path dir = fresh_dir("sac_resume_missing");
  CHECK_THROWS_AS(run_training(tiny_pendulum(), 9, dir, /*resume=*/true),
                  std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("run_sweep: single value degenerates to run_training per seed") {
  const fs::path sweep_dir = fresh_dir("sac_sweep");
  const fs::path direct_dir = fresh_dir("sac_sweep_direct");
  ExperimentConfig c = tiny_pendulum();
  c.seeds = {1, 2};
  SweepResult res = run_sweep(c, "reward_scale", {5.0}, sweep_dir, 2);
  REQUIRE(res.summary.size() == 2);
  CHECK(fs::exists(res.long_csv));
  CHECK(fs::exists(res.summary_csv));

  const fs::path direct = run_training(c, 1, direct_dir);
  CHECK(metrics_equal_ignoring_wall(
      direct, run_paths(sweep_dir / "reward_scale_5", 1).metrics));

  CHECK_THROWS_AS(run_sweep(c, "gamma", {0.9}, sweep_dir),
                  std::invalid_argument);
  fs::remove_all(sweep_dir);
  fs::remove_all(direct_dir);
}
