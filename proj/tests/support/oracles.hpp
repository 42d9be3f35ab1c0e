#pragma once

// Independent reference implementations used as test oracles. Everything
// here is deliberately written with straight loops and scalar std::
// functions, not through the Graph/agent code paths it checks.

#include <cstdint>
#include <functional>
#include <vector>

#include "sac/agent.hpp"
#include "sac/mlp.hpp"
#include "sac/rng.hpp"
#include "sac/tabular.hpp"
#include "sac/tensor.hpp"

namespace sac::oracles {

/// MLP forward by plain matrix arithmetic (no graph involved).
Tensor naive_mlp_forward(const MlpSpec& spec, const ParameterSet& params,
                         const Tensor& input);

/// Adaptive Simpson quadrature on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-9);

/// Squashed-Gaussian log-density at pre-squash point u (scalar, 1-D),
/// computed directly from the definition.
double squashed_log_density(double mean, double log_std, double u);

/// Eq. 2 backup as one literal loop nest.
tabular::QTable naive_soft_backup(const tabular::QTable& q,
                                  const tabular::TabularPolicy& pi,
                                  const tabular::TabularMdp& mdp,
                                  double alpha);

/// Conventional (hard, alpha = 0) optimal Q via value iteration.
tabular::QTable hard_value_iteration(const tabular::TabularMdp& mdp,
                                     double tol = 1e-12);

/// Random dense MDP: 2..max_states states, 2..max_actions actions,
/// rewards uniform in [-1, 1], rows normalized.
tabular::TabularMdp random_mdp(Rng& rng, std::size_t max_states,
                               std::size_t max_actions, double gamma);
tabular::TabularPolicy random_policy(Rng& rng, std::size_t n_states,
                                     std::size_t n_actions);

/// Pearson statistic against the uniform null.
double chi_square_uniform_stat(const std::vector<std::size_t>& counts);

// Gradient-check harnesses. Each builds a random instance from the seed,
// compares reverse-mode gradients against central finite differences
// (h = 1e-5, relative floor 1e-8) and returns the max relative error.

double mlp_gradient_check(std::uint64_t seed);
double value_loss_gradient_check(std::uint64_t seed);
double q_loss_gradient_check(std::uint64_t seed, int which);
double policy_loss_gradient_check(std::uint64_t seed);

/// Small random agent + batch shared by the loss checks above.
struct LossFixture {
  Agent agent;
  Batch batch;
  Tensor noise;
};
LossFixture make_loss_fixture(std::uint64_t seed,
                              AgentVariant variant = AgentVariant::kSoftPolyak);

}  // namespace sac::oracles
