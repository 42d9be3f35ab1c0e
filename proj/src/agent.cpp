#include "sac/agent.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sac/binio.hpp"

namespace sac {

namespace {

// Plain-tensor column concat for replay (s, a) pairs; both inputs constant.
Tensor hcat(const Tensor& a, const Tensor& b) {
  const std::size_t rows = a.rows(), ca = a.cols(), cb = b.cols();
  if (b.rows() != rows) throw std::invalid_argument("hcat: row mismatch");
  Tensor out({rows, ca + cb}, std::vector<double>(rows * (ca + cb)));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < ca; ++j)
      out.data[i * (ca + cb) + j] = a.data[i * ca + j];
    for (std::size_t j = 0; j < cb; ++j)
      out.data[i * (ca + cb) + ca + j] = b.data[i * cb + j];
  }
  return out;
}

ParameterSet build_policy_net(const AgentConfig& cfg, std::uint64_t seed) {
  if (cfg.hidden.empty())
    throw std::invalid_argument("policy net needs at least one hidden layer");
  Rng rng(seed);
  ParameterSet params;
  auto push_layer = [&](std::size_t in, std::size_t out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Tensor w({in, out}, std::vector<double>(in * out));
    for (auto& v : w.data) v = rng.uniform(-bound, bound);
    params.tensors.push_back(std::move(w));
    params.tensors.push_back(Tensor::zeros({out}));
  };
  std::size_t in = cfg.state_dim;
  for (std::size_t h : cfg.hidden) {
    push_layer(in, h);
    in = h;
  }
  push_layer(in, cfg.action_dim);  // mean head
  push_layer(in, cfg.action_dim);  // log-std head
  return params;
}

// Twin-min critic over the given Q parameter sets.
ValueId twin_min_critic(Graph& g, const Agent& agent, const ParameterSet& qa,
                        const ParameterSet& qb, ValueId states,
                        ValueId action) {
  auto qa_ids = insert_params(g, qa);
  auto qb_ids = insert_params(g, qb);
  ValueId input = g.concat_cols(states, action);
  ValueId v1 = mlp_forward(g, agent.q_spec, qa_ids, input);
  ValueId v2 = mlp_forward(g, agent.q_spec, qb_ids, input);
  return g.minimum(v1, v2);
}

double tensor_mean(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data) s += v;
  return s / static_cast<double>(t.size());
}

void polyak_update(ParameterSet& target, const ParameterSet& source,
                   double tau) {
  for (std::size_t i = 0; i < target.tensors.size(); ++i) {
    auto& td = target.tensors[i].data;
    const auto& sd = source.tensors[i].data;
    for (std::size_t k = 0; k < td.size(); ++k)
      td[k] = tau * sd[k] + (1.0 - tau) * td[k];
  }
}

constexpr char kMagic[9] = "SACAGNT1";
constexpr std::uint64_t kVersion = 1;

void write_tensor(std::ostream& out, const Tensor& t) {
  binio::write_u64(out, t.rank());
  for (std::size_t d : t.shape) binio::write_u64(out, d);
  binio::write_f64_block(out, t.data);
}

Tensor read_tensor(std::istream& in) {
  std::vector<std::size_t> shape(binio::read_u64(in));
  for (auto& d : shape) d = binio::read_u64(in);
  std::vector<double> data = binio::read_f64_block(in);
  return Tensor(std::move(shape), std::move(data));
}

void write_params(std::ostream& out, const ParameterSet& p) {
  binio::write_u64(out, p.tensors.size());
  for (const auto& t : p.tensors) write_tensor(out, t);
}

ParameterSet read_params(std::istream& in) {
  ParameterSet p;
  p.tensors.resize(binio::read_u64(in));
  for (auto& t : p.tensors) t = read_tensor(in);
  return p;
}

void write_adam(std::ostream& out, const AdamState& s) {
  binio::write_u64(out, s.step_count);
  binio::write_f64(out, s.lr);
  binio::write_f64(out, s.beta1);
  binio::write_f64(out, s.beta2);
  binio::write_f64(out, s.epsilon);
  binio::write_u64(out, s.first_moment.size());
  for (const auto& t : s.first_moment) write_tensor(out, t);
  for (const auto& t : s.second_moment) write_tensor(out, t);
}

AdamState read_adam(std::istream& in) {
  AdamState s;
  s.step_count = binio::read_u64(in);
  s.lr = binio::read_f64(in);
  s.beta1 = binio::read_f64(in);
  s.beta2 = binio::read_f64(in);
  s.epsilon = binio::read_f64(in);
  const std::uint64_t n = binio::read_u64(in);
  s.first_moment.resize(n);
  s.second_moment.resize(n);
  for (auto& t : s.first_moment) t = read_tensor(in);
  for (auto& t : s.second_moment) t = read_tensor(in);
  return s;
}

}  // namespace

void AgentConfig::validate() const {
  if (state_dim == 0 || action_dim == 0)
    throw std::invalid_argument("AgentConfig: zero state or action dim");
  if (hidden.empty())
    throw std::invalid_argument("AgentConfig: no hidden layers");
  if (!(lr >= 0.0))
    throw std::invalid_argument("AgentConfig: bad learning rate");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("AgentConfig: gamma must be in [0, 1)");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("AgentConfig: tau must be in [0, 1]");
  if (!(reward_scale > 0.0))
    throw std::invalid_argument("AgentConfig: reward_scale must be > 0");
  if (batch_size == 0 || target_update_interval == 0)
    throw std::invalid_argument("AgentConfig: zero batch or update interval");
}

Batch stack_batch(const std::vector<const Transition*>& transitions) {
  if (transitions.empty())
    throw std::invalid_argument("stack_batch: empty batch");
  const std::size_t n = transitions.size();
  const std::size_t sdim = transitions[0]->state.size();
  const std::size_t adim = transitions[0]->action.size();
  Batch b{Tensor::zeros({n, sdim}), Tensor::zeros({n, adim}),
          Tensor::zeros({n, 1}), Tensor::zeros({n, sdim}),
          Tensor::zeros({n, 1})};
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& t = *transitions[i];
    if (t.state.size() != sdim || t.action.size() != adim ||
        t.next_state.size() != sdim)
      throw std::invalid_argument("stack_batch: ragged transition");
    for (std::size_t j = 0; j < sdim; ++j) {
      b.states.data[i * sdim + j] = t.state[j];
      b.next_states.data[i * sdim + j] = t.next_state[j];
    }
    for (std::size_t j = 0; j < adim; ++j)
      b.actions.data[i * adim + j] = t.action[j];
    b.rewards.data[i] = t.reward;
    b.terminals.data[i] = t.terminal ? 1.0 : 0.0;
  }
  return b;
}

Agent make_agent(const AgentConfig& config, std::uint64_t seed) {
  config.validate();
  Agent a;
  a.config = config;
  a.q_spec = MlpSpec{config.state_dim + config.action_dim, config.hidden, 1};
  a.v_spec = MlpSpec{config.state_dim, config.hidden, 1};

  Rng seeds(seed, 7);
  a.policy = build_policy_net(config, seeds.next_u64());
  a.q1 = build_mlp(a.q_spec, seeds.next_u64());
  a.q2 = build_mlp(a.q_spec, seeds.next_u64());
  a.v = build_mlp(a.v_spec, seeds.next_u64());
  a.v_target = a.v;
  if (config.variant == AgentVariant::kDeterministicAblation) {
    a.q1_target = a.q1;
    a.q2_target = a.q2;
  }

  a.opt_value = AdamState::for_params(a.v, config.lr);
  a.opt_q1 = AdamState::for_params(a.q1, config.lr);
  a.opt_q2 = AdamState::for_params(a.q2, config.lr);
  a.opt_policy = AdamState::for_params(a.policy, config.lr);
  return a;
}

PolicyHeads policy_forward(Graph& g, const Agent& agent,
                           std::span<const ValueId> policy_ids,
                           ValueId state) {
  const std::size_t trunk_layers = agent.config.hidden.size();
  if (policy_ids.size() != 2 * trunk_layers + 4)
    throw std::invalid_argument("policy_forward: parameter count mismatch");
  ValueId h = state;
  for (std::size_t layer = 0; layer < trunk_layers; ++layer)
    h = g.relu(g.affine(h, policy_ids[2 * layer], policy_ids[2 * layer + 1]));
  ValueId mean = g.affine(h, policy_ids[2 * trunk_layers],
                          policy_ids[2 * trunk_layers + 1]);
  ValueId log_std = g.affine(h, policy_ids[2 * trunk_layers + 2],
                             policy_ids[2 * trunk_layers + 3]);
  return PolicyHeads{mean, log_std};
}

std::vector<double> act(const Agent& agent, const std::vector<double>& state,
                        ActionMode mode, Rng& rng) {
  if (state.size() != agent.config.state_dim)
    throw std::invalid_argument("act: state dimension mismatch");
  Graph g;
  auto pol = insert_params(g, agent.policy);
  ValueId s = g.leaf(Tensor::row(state));
  PolicyHeads heads = policy_forward(g, agent, pol, s);

  const std::size_t adim = agent.config.action_dim;
  if (mode == ActionMode::kDeterministic) {
    GaussianHead head{g.value(heads.mean), g.value(heads.log_std)};
    return mean_action(head).data;
  }
  if (agent.config.variant == AgentVariant::kDeterministicAblation) {
    // Fixed exploration noise in pre-squash space.
    Tensor mean = g.value(heads.mean);
    std::vector<double> a(adim);
    for (std::size_t j = 0; j < adim; ++j)
      a[j] = std::tanh(mean.data[j] +
                       agent.config.exploration_noise * rng.normal());
    return a;
  }
  Tensor noise({1, adim}, rng.normal_vector(adim));
  SquashedSample sample =
      sample_squashed(g, heads.mean, heads.log_std, std::move(noise));
  return g.value(sample.action).data;
}

ValueTargetInfo value_targets(const Agent& agent, const Tensor& states,
                              const Tensor& noise) {
  Graph g;
  auto pol = insert_params(g, agent.policy);
  ValueId s = g.leaf(states);
  PolicyHeads heads = policy_forward(g, agent, pol, s);
  SquashedSample sample = sample_squashed(g, heads.mean, heads.log_std, noise);
  ValueId input = g.concat_cols(s, sample.action);
  ValueId q1 = mlp_forward(g, agent.q_spec, insert_params(g, agent.q1), input);
  ValueId q2 = mlp_forward(g, agent.q_spec, insert_params(g, agent.q2), input);
  ValueId qmin = g.minimum(q1, q2);

  ValueTargetInfo info;
  info.q1_values = g.value(q1);
  info.q2_values = g.value(q2);
  info.q_min = g.value(qmin);
  info.log_probs = g.value(sample.log_prob);
  info.targets = Tensor::zeros(info.q_min.shape);
  for (std::size_t i = 0; i < info.targets.size(); ++i) {
    const double qm = info.q_min.data[i];
    if (qm > info.q1_values.data[i] || qm > info.q2_values.data[i])
      throw std::logic_error("value_targets: twin-min above a Q value");
    info.targets.data[i] = qm - info.log_probs.data[i];
  }
  return info;
}

LossResult value_loss(const Agent& agent, const Batch& batch,
                      const Tensor& noise) {
  if (!agent.uses_value_net()) return LossResult{};
  ValueTargetInfo info = value_targets(agent, batch.states, noise);
  Graph g;
  auto vids = insert_params(g, agent.v);
  ValueId v = mlp_forward(g, agent.v_spec, vids, g.leaf(batch.states));
  ValueId diff = g.sub(v, g.leaf(info.targets));
  ValueId loss = g.mul_scalar(g.mean(g.square(diff)), 0.5);
  g.backward(loss);
  return LossResult{g.value(loss).data[0], harvest_grads(g, vids)};
}

Tensor q_targets(const Agent& agent, const Batch& batch) {
  const std::size_t n = batch.size();
  Tensor bootstrap;
  if (agent.uses_value_net()) {
    bootstrap = mlp_eval(agent.v_spec, agent.v_target, batch.next_states);
  } else {
    // No value function: bootstrap from the target Q pair at the current
    // policy's mean action (no target actor).
    Graph g;
    auto pol = insert_params(g, agent.policy);
    ValueId s2 = g.leaf(batch.next_states);
    PolicyHeads heads = policy_forward(g, agent, pol, s2);
    ValueId a2 = g.clamp(g.tanh(heads.mean), -1.0 + kSquashMargin,
                         1.0 - kSquashMargin);
    ValueId qmin =
        twin_min_critic(g, agent, agent.q1_target, agent.q2_target, s2, a2);
    bootstrap = g.value(qmin);
  }
  Tensor targets = Tensor::zeros({n, 1});
  for (std::size_t i = 0; i < n; ++i) {
    targets.data[i] =
        agent.config.reward_scale * batch.rewards.data[i] +
        (1.0 - batch.terminals.data[i]) * agent.config.gamma *
            bootstrap.data[i];
  }
  return targets;
}

LossResult q_loss(const Agent& agent, const Batch& batch, int which) {
  if (which != 1 && which != 2)
    throw std::invalid_argument("q_loss: which must be 1 or 2");
  const ParameterSet& qp = which == 1 ? agent.q1 : agent.q2;
  Tensor targets = q_targets(agent, batch);
  Graph g;
  auto qids = insert_params(g, qp);
  ValueId input = g.leaf(hcat(batch.states, batch.actions));
  ValueId q = mlp_forward(g, agent.q_spec, qids, input);
  ValueId diff = g.sub(q, g.leaf(targets));
  ValueId loss = g.mul_scalar(g.mean(g.square(diff)), 0.5);
  g.backward(loss);
  return LossResult{g.value(loss).data[0], harvest_grads(g, qids)};
}

PolicyLossResult policy_loss_with_critic(const Agent& agent,
                                         const Tensor& states,
                                         const Tensor& noise,
                                         const CriticFn& critic) {
  Graph g;
  auto pol = insert_params(g, agent.policy);
  ValueId s = g.leaf(states);
  PolicyHeads heads = policy_forward(g, agent, pol, s);

  PolicyLossResult result;
  if (agent.config.variant == AgentVariant::kDeterministicAblation) {
    ValueId a = g.clamp(g.tanh(heads.mean), -1.0 + kSquashMargin,
                        1.0 - kSquashMargin);
    ValueId qmin = critic(g, s, a);
    ValueId loss = g.mul_scalar(g.mean(qmin), -1.0);
    g.backward(loss);
    result.loss = g.value(loss).data[0];
    result.mean_q = tensor_mean(g.value(qmin));
    result.entropy_estimate = 0.0;
  } else {
    SquashedSample sample =
        sample_squashed(g, heads.mean, heads.log_std, noise);
    ValueId qmin = critic(g, s, sample.action);
    ValueId loss = g.mean(g.sub(sample.log_prob, qmin));
    g.backward(loss);
    result.loss = g.value(loss).data[0];
    result.mean_q = tensor_mean(g.value(qmin));
    result.entropy_estimate = -tensor_mean(g.value(sample.log_prob));
  }
  result.grads = harvest_grads(g, pol);
  return result;
}

PolicyLossResult policy_loss(const Agent& agent, const Tensor& states,
                             const Tensor& noise) {
  return policy_loss_with_critic(
      agent, states, noise,
      [&agent](Graph& g, ValueId s, ValueId a) {
        return twin_min_critic(g, agent, agent.q1, agent.q2, s, a);
      });
}

void update_targets(Agent& agent) {
  switch (agent.config.variant) {
    case AgentVariant::kSoftPolyak:
      polyak_update(agent.v_target, agent.v, agent.config.tau);
      break;
    case AgentVariant::kSoftHardTarget:
      if (agent.gradient_steps % agent.config.target_update_interval == 0)
        agent.v_target = agent.v;
      break;
    case AgentVariant::kDeterministicAblation:
      if (agent.gradient_steps % agent.config.target_update_interval == 0) {
        agent.q1_target = agent.q1;
        agent.q2_target = agent.q2;
      }
      break;
  }
}

StepMetrics train_step(Agent& agent, const ReplayBuffer& buffer, Rng& rng) {
  Batch batch = stack_batch(buffer.sample(agent.config.batch_size, rng));
  const std::size_t n = batch.size();
  const std::size_t adim = agent.config.action_dim;

  Tensor value_noise({n, adim}, rng.normal_vector(n * adim));
  Tensor policy_noise({n, adim}, rng.normal_vector(n * adim));

  // All gradients are computed from the pre-step parameters, then applied
  // in the order value, q1, q2, policy.
  LossResult v_res = value_loss(agent, batch, value_noise);
  LossResult q1_res = q_loss(agent, batch, 1);
  LossResult q2_res = q_loss(agent, batch, 2);
  PolicyLossResult pi_res = policy_loss(agent, batch.states, policy_noise);

  if (agent.uses_value_net()) adam_step(agent.opt_value, agent.v, v_res.grads);
  adam_step(agent.opt_q1, agent.q1, q1_res.grads);
  adam_step(agent.opt_q2, agent.q2, q2_res.grads);
  adam_step(agent.opt_policy, agent.policy, pi_res.grads);

  agent.gradient_steps += 1;
  update_targets(agent);

  return StepMetrics{v_res.loss,  q1_res.loss,     q2_res.loss,
                     pi_res.loss, pi_res.mean_q,   pi_res.entropy_estimate};
}

void save_agent(const Agent& agent, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("save_agent: cannot open " + path.string());
  save_agent(agent, out);
  if (!out) throw std::runtime_error("save_agent: write failed");
}

void save_agent(const Agent& agent, std::ostream& out) {
  binio::write_magic(out, kMagic);
  binio::write_u64(out, kVersion);
  const AgentConfig& c = agent.config;
  binio::write_u64(out, static_cast<std::uint64_t>(c.variant));
  binio::write_u64(out, c.state_dim);
  binio::write_u64(out, c.action_dim);
  binio::write_u64(out, c.hidden.size());
  for (std::size_t h : c.hidden) binio::write_u64(out, h);
  binio::write_f64(out, c.lr);
  binio::write_f64(out, c.gamma);
  binio::write_f64(out, c.tau);
  binio::write_f64(out, c.reward_scale);
  binio::write_u64(out, c.target_update_interval);
  binio::write_u64(out, c.batch_size);
  binio::write_f64(out, c.exploration_noise);
  binio::write_u64(out, agent.gradient_steps);
  write_params(out, agent.policy);
  write_params(out, agent.q1);
  write_params(out, agent.q2);
  write_params(out, agent.v);
  write_params(out, agent.v_target);
  binio::write_u64(out, agent.q1_target.tensors.empty() ? 0 : 1);
  if (!agent.q1_target.tensors.empty()) {
    write_params(out, agent.q1_target);
    write_params(out, agent.q2_target);
  }
  write_adam(out, agent.opt_value);
  write_adam(out, agent.opt_q1);
  write_adam(out, agent.opt_q2);
  write_adam(out, agent.opt_policy);
}

Agent load_agent(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_agent: cannot open " + path.string());
  return load_agent(in);
}

Agent load_agent(std::istream& in) {
  binio::expect_magic(in, kMagic, "load_agent");
  if (binio::read_u64(in) != kVersion)
    throw std::runtime_error("load_agent: unsupported version");
  Agent a;
  AgentConfig c;
  c.variant = static_cast<AgentVariant>(binio::read_u64(in));
  c.state_dim = binio::read_u64(in);
  c.action_dim = binio::read_u64(in);
  c.hidden.resize(binio::read_u64(in));
  for (auto& h : c.hidden) h = binio::read_u64(in);
  c.lr = binio::read_f64(in);
  c.gamma = binio::read_f64(in);
  c.tau = binio::read_f64(in);
  c.reward_scale = binio::read_f64(in);
  c.target_update_interval = binio::read_u64(in);
  c.batch_size = binio::read_u64(in);
  c.exploration_noise = binio::read_f64(in);
  a.config = c;
  a.q_spec = MlpSpec{c.state_dim + c.action_dim, c.hidden, 1};
  a.v_spec = MlpSpec{c.state_dim, c.hidden, 1};
  a.gradient_steps = binio::read_u64(in);
  a.policy = read_params(in);
  a.q1 = read_params(in);
  a.q2 = read_params(in);
  a.v = read_params(in);
  a.v_target = read_params(in);
  if (binio::read_u64(in) != 0) {
    a.q1_target = read_params(in);
    a.q2_target = read_params(in);
  }
  a.opt_value = read_adam(in);
  a.opt_q1 = read_adam(in);
  a.opt_q2 = read_adam(in);
  a.opt_policy = read_adam(in);
  return a;
}

}  // namespace sac
