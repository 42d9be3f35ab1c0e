#pragma once

#include <cstdint>
#include <vector>

#include "sac/mlp.hpp"
#include "sac/tensor.hpp"

namespace sac {

/// Adam optimizer state for one parameter set. Constants default to the
/// usual 0.9 / 0.999 / 1e-8.
struct AdamState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step_count = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_params(const ParameterSet& params, double lr);
};

/// In-place bias-corrected Adam update:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
void adam_step(AdamState& state, ParameterSet& params,
               const std::vector<Tensor>& grads);

}  // namespace sac
