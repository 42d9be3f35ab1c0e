#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "sac/adam.hpp"
#include "sac/distributions.hpp"
#include "sac/graph.hpp"
#include "sac/mlp.hpp"
#include "sac/replay.hpp"
#include "sac/rng.hpp"
#include "sac/tensor.hpp"

namespace sac {

enum class AgentVariant {
  kSoftPolyak,            // Polyak-averaged target value net, every step
  kSoftHardTarget,        // periodic hard copy of the value net
  kDeterministicAblation  // no value net, no entropy terms, fixed noise,
                          // hard-updated target Q pair
};

enum class ActionMode { kStochastic, kDeterministic };

struct AgentConfig {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::vector<std::size_t> hidden = {64, 64};
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double reward_scale = 1.0;
  std::size_t target_update_interval = 1;
  std::size_t batch_size = 256;
  AgentVariant variant = AgentVariant::kSoftPolyak;
  double exploration_noise = 0.1;  // ablation pre-squash sigma

  void validate() const;
};

/// Minibatch stacked into tensors: states B x S, actions B x A,
/// rewards / terminals B x 1.
struct Batch {
  Tensor states;
  Tensor actions;
  Tensor rewards;
  Tensor next_states;
  Tensor terminals;

  std::size_t size() const { return states.rows(); }
};

Batch stack_batch(const std::vector<const Transition*>& transitions);

/// Policy, twin Q, value and target-value parameter vectors plus their
/// optimizers. The policy net is a shared trunk with separate affine mean
/// and log-std heads (tensor order: trunk W/b pairs, mean W/b, log-std W/b).
struct Agent {
  AgentConfig config;
  MlpSpec q_spec;  // (state+action) -> 1
  MlpSpec v_spec;  // state -> 1
  ParameterSet policy;
  ParameterSet q1, q2;
  ParameterSet v, v_target;
  ParameterSet q1_target, q2_target;  // ablation variant only
  AdamState opt_value, opt_q1, opt_q2, opt_policy;
  std::uint64_t gradient_steps = 0;

  bool uses_value_net() const {
    return config.variant != AgentVariant::kDeterministicAblation;
  }
};

Agent make_agent(const AgentConfig& config, std::uint64_t seed);

/// Policy net output heads recorded on a graph.
struct PolicyHeads {
  ValueId mean;
  ValueId log_std;
};
PolicyHeads policy_forward(Graph& g, const Agent& agent,
                           std::span<const ValueId> policy_ids, ValueId state);

/// Canonical (-1, 1) action for one state row.
/// Stochastic mode draws noise from `rng` (reparameterized squashed sample;
/// the ablation uses tanh(mean + sigma * eps) with fixed sigma instead).
std::vector<double> act(const Agent& agent, const std::vector<double>& state,
                        ActionMode mode, Rng& rng);

struct LossResult {
  double loss = 0.0;
  std::vector<Tensor> grads;
};

/// Inputs to the value regression target, exposed for tests and the
/// per-step twin-min check.
struct ValueTargetInfo {
  Tensor targets;  // min(Q1,Q2)(s, a~) - log pi(a~|s), B x 1
  Tensor q_min;
  Tensor q1_values;
  Tensor q2_values;
  Tensor log_probs;
};
ValueTargetInfo value_targets(const Agent& agent, const Tensor& states,
                              const Tensor& noise);

/// J_V: 0.5 * mean (V(s) - target)^2 with a fresh policy sample per state;
/// the target is a constant w.r.t. the value parameters. `noise` is one
/// standard-normal row per batch state.
LossResult value_loss(const Agent& agent, const Batch& batch,
                      const Tensor& noise);

/// Q regression target: reward_scale * r + (1 - terminal) * gamma * V_bar(s').
/// The ablation bootstraps from min of the target Q pair at the current
/// policy mean action instead.
Tensor q_targets(const Agent& agent, const Batch& batch);

/// J_Q for one critic (`which` is 1 or 2) on replay actions.
LossResult q_loss(const Agent& agent, const Batch& batch, int which);

/// In-graph critic: maps (states leaf, action node) to B x 1 values.
using CriticFn =
    std::function<ValueId(Graph& g, ValueId states, ValueId action)>;

struct PolicyLossResult {
  double loss = 0.0;
  std::vector<Tensor> grads;
  double entropy_estimate = 0.0;  // -mean log pi at the drawn actions
  double mean_q = 0.0;
};

/// J_pi: mean [log pi(f(eps;s)|s) - min Q(s, f(eps;s))]. Gradients flow
/// through both the log-prob and the action path; only policy gradients
/// are returned. The ablation drops the log-prob term and uses tanh(mean).
PolicyLossResult policy_loss(const Agent& agent, const Tensor& states,
                             const Tensor& noise);
PolicyLossResult policy_loss_with_critic(const Agent& agent,
                                         const Tensor& states,
                                         const Tensor& noise,
                                         const CriticFn& critic);

/// Target maintenance per variant. Call once per gradient step, after the
/// step counter has been advanced.
void update_targets(Agent& agent);

struct StepMetrics {
  double j_v = 0.0;
  double j_q1 = 0.0;
  double j_q2 = 0.0;
  double j_pi = 0.0;
  double mean_q = 0.0;
  double entropy = 0.0;
};

/// One Algorithm-1 gradient step: sample a minibatch, compute all losses
/// from the pre-step parameters, apply Adam in the order value, q1, q2,
/// policy, then update targets. `rng` is consumed in a fixed order:
/// batch indices, value noise, policy noise.
StepMetrics train_step(Agent& agent, const ReplayBuffer& buffer, Rng& rng);

/// Checkpoint: every parameter set, optimizer state and step counter in a
/// little-endian layout with magic "SACAGNT1" and a version word.
void save_agent(const Agent& agent, const std::filesystem::path& path);
void save_agent(const Agent& agent, std::ostream& out);
Agent load_agent(const std::filesystem::path& path);
Agent load_agent(std::istream& in);

}  // namespace sac
