#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace sac::tabular {

/// Entropy temperature. Strictly positive.
struct Temperature {
  double alpha;
  explicit Temperature(double a) : alpha(a) {
    if (!(a > 0.0)) throw std::invalid_argument("Temperature must be > 0");
  }
};

/// Finite MDP with dense transition kernel.
/// transition[(s * n_actions + a) * n_states + s2] = p(s2 | s, a).
struct TabularMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> transition;
  std::vector<double> reward;  // reward[s * n_actions + a]
  double gamma = 0.9;
  std::vector<double> initial_distribution;

  double p(std::size_t s, std::size_t a, std::size_t s2) const {
    return transition[(s * n_actions + a) * n_states + s2];
  }
  double r(std::size_t s, std::size_t a) const {
    return reward[s * n_actions + a];
  }
  double reward_max_abs() const;

  /// Checks stochasticity of rows (1e-12), gamma in [0,1), finite rewards.
  void validate() const;
};

/// Row-stochastic policy table. probs[s * n_actions + a] = pi(a|s).
struct TabularPolicy {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> probs;

  static TabularPolicy uniform(std::size_t n_states, std::size_t n_actions);
  double pi(std::size_t s, std::size_t a) const {
    return probs[s * n_actions + a];
  }
  /// Max over states of the L1 distance between rows.
  double max_row_distance(const TabularPolicy& other) const;
};

struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> q;

  static QTable zeros(std::size_t n_states, std::size_t n_actions);
  double at(std::size_t s, std::size_t a) const { return q[s * n_actions + a]; }
  double sup_distance(const QTable& other) const;
};

/// Soft state values V(s) = sum_a pi(a|s) (Q(s,a) - alpha log pi(a|s)).
/// Zero-probability actions contribute nothing.
std::vector<double> soft_values(const QTable& q, const TabularPolicy& pi,
                                Temperature alpha);

/// One application of the entropy-augmented Bellman operator:
/// Q'(s,a) = r(s,a) + gamma * sum_s2 p(s2|s,a) V(s2).
QTable soft_backup(const QTable& q, const TabularPolicy& pi,
                   const TabularMdp& mdp, Temperature alpha);

/// Iterates soft_backup from Q = 0 until the sup-norm change drops below
/// tol. Throws if the iteration cap (1e6) is hit.
QTable soft_policy_evaluation(const TabularPolicy& pi, const TabularMdp& mdp,
                              Temperature alpha, double tol = 1e-10);

/// KL projection onto the full tabular simplex: softmax of Q/alpha per
/// state, computed with max subtraction.
TabularPolicy soft_policy_improvement(const QTable& q, Temperature alpha);

struct IterationResult {
  TabularPolicy policy;
  QTable q;
  std::size_t iterations = 0;
};

/// Alternates evaluation and improvement until the policy moves less than
/// tol in sup row distance. Throws past the iteration cap.
IterationResult soft_policy_iteration(const TabularMdp& mdp, Temperature alpha,
                                      double tol = 1e-8,
                                      double eval_tol = 1e-10);

/// Finite-horizon truncation of the entropy-augmented discounted objective,
/// computed by exact forward propagation of the state distribution.
double maxent_objective(const TabularPolicy& pi, const TabularMdp& mdp,
                        Temperature alpha, std::size_t horizon);

/// Smallest horizon H with gamma^H (r_max + alpha log A) / (1-gamma) below
/// `precision`.
std::size_t required_horizon(const TabularMdp& mdp, Temperature alpha,
                             double precision);

/// Plain-text MDP fixture format:
///   line 1: n_states n_actions gamma
///   line 2: initial distribution (n_states values)
///   next n_states * n_actions lines: transition row for (s, a), s-major
///   next n_states lines: rewards for state s (n_actions values)
/// Whitespace separated; '#' starts a comment line.
TabularMdp load_mdp(const std::filesystem::path& path);
void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);

}  // namespace sac::tabular
