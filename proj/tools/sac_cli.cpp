// Command-line front end: training runs, hyperparameter sweeps, seed
// aggregation, plot emission and the oracle self-check suites.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "sac/config.hpp"
#include "sac/distributions.hpp"
#include "sac/metrics.hpp"
#include "sac/svg.hpp"
#include "sac/tabular.hpp"
#include "sac/training.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

// SAC_OUT_DIR overrides --out; this is the only environment override.
fs::path resolve_out_dir(const std::string& cli_out) {
  if (const char* env = std::getenv("SAC_OUT_DIR"); env && *env)
    return fs::path(env);
  return fs::path(cli_out);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(list);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("--values", "empty list");
  return out;
}

int check(bool ok, const char* name, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name,
              detail.empty() ? "" : ": ", detail.c_str());
  return ok ? 0 : 1;
}

// Compact re-run of the tabular, gradient and density property suites.
int run_oracle_tests() {
  using namespace sac;
  int failures = 0;

  {  // Contraction of the soft backup.
    Rng rng(1);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      auto mdp = oracles::random_mdp(rng, 6, 4, 0.9);
      auto pi = oracles::random_policy(rng, mdp.n_states, mdp.n_actions);
      tabular::QTable q1 = tabular::QTable::zeros(mdp.n_states, mdp.n_actions);
      tabular::QTable q2 = q1;
      for (auto& v : q1.q) v = rng.uniform(-5, 5);
      for (auto& v : q2.q) v = rng.uniform(-5, 5);
      const tabular::Temperature alpha(0.5);
      const double lhs = tabular::soft_backup(q1, pi, mdp, alpha)
                             .sup_distance(tabular::soft_backup(q2, pi, mdp, alpha));
      worst = std::max(worst, lhs - mdp.gamma * q1.sup_distance(q2));
    }
    failures += check(worst <= 1e-12, "tabular contraction",
                      "worst slack " + std::to_string(worst));
  }

  {  // Monotone improvement.
    Rng rng(2);
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
      auto mdp = oracles::random_mdp(rng, 6, 4, i % 2 ? 0.9 : 0.5);
      const tabular::Temperature alpha(i % 3 ? 1.0 : 0.3);
      auto pi = tabular::TabularPolicy::uniform(mdp.n_states, mdp.n_actions);
      auto q_prev = tabular::soft_policy_evaluation(pi, mdp, alpha, 1e-12);
      for (int step = 0; step < 10; ++step) {
        pi = tabular::soft_policy_improvement(q_prev, alpha);
        auto q_next = tabular::soft_policy_evaluation(pi, mdp, alpha, 1e-12);
        for (std::size_t k = 0; k < q_next.q.size(); ++k)
          if (q_next.q[k] < q_prev.q[k] - 1e-7) ok = false;
        q_prev = std::move(q_next);
      }
    }
    failures += check(ok, "tabular monotone improvement");
  }

  {  // Bandit closed form.
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      tabular::TabularMdp mdp;
      mdp.n_states = 1;
      mdp.n_actions = 3;
      mdp.gamma = 0.0;
      mdp.transition.assign(3, 1.0);
      mdp.reward = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      mdp.initial_distribution = {1.0};
      const double alpha = 0.5 + rng.uniform();
      auto res = tabular::soft_policy_iteration(mdp, tabular::Temperature(alpha));
      const double rmax =
          *std::max_element(mdp.reward.begin(), mdp.reward.end());
      double z = 0.0;
      std::vector<double> expected(3);
      for (int a = 0; a < 3; ++a) {
        expected[a] = std::exp((mdp.reward[a] - rmax) / alpha);
        z += expected[a];
      }
      for (int a = 0; a < 3; ++a)
        worst = std::max(worst,
                         std::abs(res.policy.probs[a] - expected[a] / z));
    }
    failures += check(worst <= 1e-8, "tabular bandit closed form",
                      "worst error " + std::to_string(worst));
  }

  {  // Gradient suites.
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      worst = std::max(worst, oracles::mlp_gradient_check(seed));
    failures += check(worst <= 1e-4, "autodiff vs finite differences",
                      "worst rel err " + std::to_string(worst));
    worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      worst = std::max(worst, oracles::value_loss_gradient_check(seed));
      worst = std::max(worst, oracles::q_loss_gradient_check(seed, 1));
      worst = std::max(worst, oracles::q_loss_gradient_check(seed, 2));
      worst = std::max(worst, oracles::policy_loss_gradient_check(seed));
    }
    failures += check(worst <= 1e-4, "loss gradients vs finite differences",
                      "worst rel err " + std::to_string(worst));
  }

  {  // Squashed density normalization.
    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      GaussianHead head{Tensor::scalar(rng.uniform(-1.5, 1.5)),
                        Tensor::scalar(rng.uniform(-1.5, 0.75))};
      auto f = [&](double a) {
        return std::exp(
            log_prob_squashed(head, Tensor::scalar(std::atanh(a))).data[0]);
      };
      const double integral =
          oracles::adaptive_simpson(f, -1.0 + 1e-12, 1.0 - 1e-12, 1e-7);
      worst = std::max(worst, std::abs(integral - 1.0));
    }
    failures += check(worst <= 1e-3, "squashed density normalization",
                      "worst deviation " + std::to_string(worst));
    bool finite = true;
    for (double ls : {-20.0, 0.0, 2.0})
      for (double u = -30.0; u <= 30.0; u += 1.0)
        finite = finite &&
                 std::isfinite(log_prob_squashed(
                                   GaussianHead{Tensor::scalar(0.0),
                                                Tensor::scalar(ls)},
                                   Tensor::scalar(u))
                                   .data[0]);
    failures += check(finite, "log-density finite for |u| <= 30");
  }

  std::printf("%s\n", failures == 0 ? "all oracle suites passed"
                                    : "oracle suites FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft actor-critic trainer and experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis, values_list, in_path, out_path;
  std::uint64_t seed = 1;
  bool resume = false;
  std::size_t workers = 0;

  auto* train = app.add_subcommand("train", "train one seed");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--seed", seed, "run seed")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_flag("--resume", resume, "continue from the resume bundle");

  auto* sweep = app.add_subcommand("sweep", "axis sweep over config seeds");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--axis", axis, "reward_scale or tau")->required();
  sweep->add_option("--values", values_list, "comma-separated values")
      ->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--workers", workers, "max parallel runs (0 = auto)");

  auto* aggregate =
      app.add_subcommand("aggregate", "combine per-seed metrics into a band");
  aggregate->add_option("--in", in_path, "directory with metrics_seed*.csv")
      ->required();
  aggregate->add_option("--out", out_path, "band CSV path")->required();

  auto* plot = app.add_subcommand("plot", "render a band CSV as SVG");
  plot->add_option("--in", in_path, "band CSV")->required();
  plot->add_option("--out", out_path, "SVG path")->required();

  app.add_subcommand("oracle-tests",
                     "run the tabular/gradient/density property suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      auto config = sac::ExperimentConfig::load(config_path);
      const fs::path out = resolve_out_dir(out_dir);
      const fs::path metrics = sac::run_training(config, seed, out, resume);
      std::printf("metrics: %s\n", metrics.string().c_str());
      return 0;
    }
    if (sweep->parsed()) {
      auto config = sac::ExperimentConfig::load(config_path);
      const fs::path out = resolve_out_dir(out_dir);
      sac::SweepResult res =
          sac::run_sweep(config, axis, parse_values(values_list), out, workers);
      std::printf("long: %s\nsummary: %s\n", res.long_csv.string().c_str(),
                  res.summary_csv.string().c_str());
      return 0;
    }
    if (aggregate->parsed()) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(in_path)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("metrics_seed") && name.ends_with(".csv"))
          files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        std::fprintf(stderr, "no metrics_seed*.csv under %s\n",
                     in_path.c_str());
        return 1;
      }
      sac::write_band(sac::aggregate_seeds(files), out_path);
      std::printf("band: %s (%zu runs)\n", out_path.c_str(), files.size());
      return 0;
    }
    if (plot->parsed()) {
      sac::emit_plot(sac::read_band(in_path), out_path);
      std::printf("plot: %s\n", out_path.c_str());
      return 0;
    }
    return run_oracle_tests();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
