#include "sac/finite_diff.hpp"

#include <cmath>
#include <stdexcept>

namespace sac {

std::vector<Tensor> finite_diff_grad(
    const std::function<double(const ParameterSet&)>& f, ParameterSet params,
    double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  std::vector<Tensor> grads;
  grads.reserve(params.tensors.size());
  for (auto& t : params.tensors) grads.push_back(Tensor::zeros(t.shape));
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    for (std::size_t k = 0; k < params.tensors[i].data.size(); ++k) {
      double& p = params.tensors[i].data[k];
      const double saved = p;
      p = saved + h;
      const double up = f(params);
      p = saved - h;
      const double down = f(params);
      p = saved;
      grads[i].data[k] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

double max_relative_error(const std::vector<Tensor>& a,
                          const std::vector<Tensor>& b, double floor) {
  if (a.size() != b.size())
    throw std::invalid_argument("max_relative_error: tensor count mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].same_shape(b[i]))
      throw std::invalid_argument("max_relative_error: shape mismatch");
    for (std::size_t k = 0; k < a[i].data.size(); ++k) {
      const double x = a[i].data[k], y = b[i].data[k];
      const double scale = std::max({std::abs(x), std::abs(y), floor});
      worst = std::max(worst, std::abs(x - y) / scale);
    }
  }
  return worst;
}

}  // namespace sac
