#pragma once

#include <functional>
#include <vector>

#include "sac/mlp.hpp"
#include "sac/tensor.hpp"

namespace sac {

/// Central-difference gradient estimate, one coordinate at a time:
///   d f / d p_k ~= (f(p + h e_k) - f(p - h e_k)) / (2h)
/// `f` must be deterministic in `params` (freeze any noise before calling).
std::vector<Tensor> finite_diff_grad(
    const std::function<double(const ParameterSet&)>& f, ParameterSet params,
    double h);

/// Max over coordinates of |a-b| / max(|a|, |b|, floor). Shapes must match.
double max_relative_error(const std::vector<Tensor>& a,
                          const std::vector<Tensor>& b, double floor = 1e-8);

}  // namespace sac
