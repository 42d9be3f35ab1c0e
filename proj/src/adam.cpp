#include "sac/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sac {

AdamState AdamState::for_params(const ParameterSet& params, double lr) {
  if (!(lr >= 0.0)) throw std::invalid_argument("AdamState: lr must be >= 0");
  AdamState s;
  s.lr = lr;
  for (const auto& t : params.tensors) {
    s.first_moment.push_back(Tensor::zeros(t.shape));
    s.second_moment.push_back(Tensor::zeros(t.shape));
  }
  return s;
}

void adam_step(AdamState& state, ParameterSet& params,
               const std::vector<Tensor>& grads) {
  if (grads.size() != params.tensors.size() ||
      state.first_moment.size() != params.tensors.size())
    throw std::invalid_argument("adam_step: tensor count mismatch");
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double corr1 = 1.0 - std::pow(state.beta1, t);
  const double corr2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    Tensor& p = params.tensors[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g))
      throw std::invalid_argument("adam_step: gradient shape mismatch at " +
                                  std::to_string(i));
    auto& m = state.first_moment[i].data;
    auto& v = state.second_moment[i].data;
    for (std::size_t k = 0; k < p.data.size(); ++k) {
      const double gk = g.data[k];
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * gk;
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * gk * gk;
      const double m_hat = m[k] / corr1;
      const double v_hat = v[k] / corr2;
      p.data[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace sac
