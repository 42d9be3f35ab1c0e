#include "sac/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sac {

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)
constexpr double kLog2 = 0.6931471805599453;
}  // namespace

ValueId clamp_log_std(Graph& g, ValueId log_std) {
  return g.clamp(log_std, kLogStdMin, kLogStdMax);
}

ValueId squashed_log_prob(Graph& g, ValueId mean, ValueId log_std, ValueId u) {
  ValueId ls = clamp_log_std(g, log_std);
  // Diagonal Gaussian term, summed over coordinates.
  ValueId inv_std = g.exp(g.mul_scalar(ls, -1.0));
  ValueId z = g.mul(g.sub(u, mean), inv_std);
  ValueId per_coord =
      g.add_scalar(g.sub(g.mul_scalar(g.square(z), -0.5), ls), -kHalfLog2Pi);
  ValueId gauss = g.row_sum(per_coord);
  // log(1 - tanh^2(u)) = 2 (log 2 - u - softplus(-2u)).
  ValueId sp = g.softplus(g.mul_scalar(u, -2.0));
  ValueId corr_coord =
      g.mul_scalar(g.add_scalar(g.add(u, sp), -kLog2), -2.0);
  ValueId corr = g.row_sum(corr_coord);
  return g.sub(gauss, corr);
}

SquashedSample sample_squashed(Graph& g, ValueId mean, ValueId log_std,
                               Tensor noise) {
  if (!g.value(mean).same_shape(noise))
    throw std::invalid_argument("sample_squashed: noise shape mismatch " +
                                shape_string(g.value(mean)) + " vs " +
                                shape_string(noise));
  ValueId ls = clamp_log_std(g, log_std);
  ValueId eps = g.leaf(std::move(noise));
  ValueId u = g.add(mean, g.mul(g.exp(ls), eps));
  SquashedSample s;
  s.noise = g.value(eps);
  s.pre_squash = u;
  s.action = g.clamp(g.tanh(u), -1.0 + kSquashMargin, 1.0 - kSquashMargin);
  s.log_prob = squashed_log_prob(g, mean, log_std, u);
  return s;
}

SampleValues sample_reparameterized(const GaussianHead& head,
                                    const Tensor& noise) {
  Graph g;
  ValueId m = g.leaf(head.mean);
  ValueId ls = g.leaf(head.log_std);
  SquashedSample s = sample_squashed(g, m, ls, noise);
  return SampleValues{s.noise, g.value(s.pre_squash), g.value(s.action),
                      g.value(s.log_prob)};
}

Tensor log_prob_squashed(const GaussianHead& head, const Tensor& u) {
  Graph g;
  ValueId lp = squashed_log_prob(g, g.leaf(head.mean), g.leaf(head.log_std),
                                 g.leaf(u));
  return g.value(lp);
}

Tensor mean_action(const GaussianHead& head) {
  Tensor a = head.mean;
  for (auto& v : a.data) {
    v = std::tanh(v);
    v = std::clamp(v, -1.0 + kSquashMargin, 1.0 - kSquashMargin);
  }
  a.grad.reset();
  return a;
}

}  // namespace sac
