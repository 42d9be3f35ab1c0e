#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sac/distributions.hpp"
#include "sac/graph.hpp"
#include "sac/rng.hpp"
#include "support/oracles.hpp"

using namespace sac;

namespace {

GaussianHead head1d(double mean, double log_std) {
  return GaussianHead{Tensor::scalar(mean), Tensor::scalar(log_std)};
}

// Library density of the squashed variable at a, via u = atanh(a).
double density_at(const GaussianHead& head, double a) {
  const double u = std::atanh(a);
  return std::exp(log_prob_squashed(head, Tensor::scalar(u)).data[0]);
}

}  // namespace

TEST_CASE("sample: zero head and zero noise give zero action") {
  auto s = sample_reparameterized(head1d(0.0, 0.0), Tensor::scalar(0.0));
  CHECK(s.pre_squash.data[0] == 0.0);
  CHECK(s.action.data[0] == 0.0);
}

TEST_CASE("sample: collapsed variance reduces to tanh(mean)") {
  // log_std below the clamp floor: sigma = e^-20, any noise is negligible.
  for (double noise : {-3.0, 0.5, 2.0}) {
    auto s = sample_reparameterized(head1d(0.8, -45.0), Tensor::scalar(noise));
    CHECK(s.action.data[0] == doctest::Approx(std::tanh(0.8)).epsilon(1e-8));
  }
}

TEST_CASE("sample: d(action)/d(mean) = 1 - tanh^2 at the mean point") {
  Graph g;
  ValueId mean = g.leaf(Tensor::scalar(0.0));
  ValueId log_std = g.leaf(Tensor::scalar(0.0));
  SquashedSample s = sample_squashed(g, mean, log_std, Tensor::scalar(0.0));
  g.backward(g.sum(s.action));
  CHECK(g.grad(mean).data[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample rejects mismatched noise shape") {
  Graph g;
  ValueId mean = g.leaf(Tensor::zeros({2, 2}));
  ValueId log_std = g.leaf(Tensor::zeros({2, 2}));
  CHECK_THROWS_AS(sample_squashed(g, mean, log_std, Tensor::zeros({2, 3})),
                  std::invalid_argument);
}

TEST_CASE("log_prob at u = 0 for the unit Gaussian head") {
  Tensor lp = log_prob_squashed(head1d(0.0, 0.0), Tensor::scalar(0.0));
  CHECK(lp.data[0] == doctest::Approx(-0.9189385).epsilon(1e-7));
}

TEST_CASE("log_prob stays finite and correct where the naive form underflows") {
  // 1 - tanh^2(15) underflows badly; the softplus identity does not.
  Tensor lp = log_prob_squashed(head1d(0.0, 0.0), Tensor::scalar(15.0));
  CHECK(std::isfinite(lp.data[0]));
  CHECK(lp.data[0] ==
        doctest::Approx(oracles::squashed_log_density(0.0, 0.0, 15.0))
            .epsilon(1e-12));
  // Structure: Gaussian term minus the 2(log2 - u - softplus(-2u)) correction.
  const double gauss = -0.5 * 15.0 * 15.0 - 0.9189385332046727;
  const double corr = 2.0 * (std::log(2.0) - 15.0);
  CHECK(lp.data[0] == doctest::Approx(gauss - corr).epsilon(1e-10));
}

TEST_CASE("log_prob finite over the whole clamp range and |u| <= 30") {
  for (double log_std : {-25.0, -20.0, -5.0, 0.0, 2.0, 6.0})
    for (double u = -30.0; u <= 30.0; u += 3.0) {
      Tensor lp = log_prob_squashed(head1d(0.4, log_std), Tensor::scalar(u));
      CAPTURE(log_std);
      CAPTURE(u);
      CHECK(std::isfinite(lp.data[0]));
    }
}

TEST_CASE("mean_action values") {
  CHECK(mean_action(head1d(0.0, 0.7)).data[0] == 0.0);
  CHECK(mean_action(head1d(0.5, -3.0)).data[0] ==
        doctest::Approx(0.4621171).epsilon(1e-7));
  const double extreme = mean_action(head1d(50.0, 0.0)).data[0];
  CHECK(extreme < 1.0);
  CHECK(extreme == doctest::Approx(1.0 - 1e-12).epsilon(1e-13));
}

TEST_CASE("support: samples strictly inside (-1,1) for random heads") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.uniform_index(3);
    GaussianHead head{Tensor({1, d}, std::vector<double>(d)),
                      Tensor({1, d}, std::vector<double>(d))};
    for (auto& v : head.mean.data) v = rng.uniform(-30.0, 30.0);
    for (auto& v : head.log_std.data) v = rng.uniform(-25.0, 5.0);
    Tensor noise({1, d}, rng.normal_vector(d));
    auto s = sample_reparameterized(head, noise);
    for (double a : s.action.data) {
      CHECK(a > -1.0);
      CHECK(a < 1.0);
    }
    CHECK(std::isfinite(s.log_prob.data[0]));
  }
}

TEST_CASE("normalization: 1-D density integrates to 1 by quadrature") {
  Rng rng(31415);
  for (int trial = 0; trial < 20; ++trial) {
    GaussianHead head =
        head1d(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 0.75));
    auto f = [&](double a) { return density_at(head, a); };
    const double integral =
        oracles::adaptive_simpson(f, -1.0 + 1e-12, 1.0 - 1e-12, 1e-7);
    CAPTURE(trial);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("consistency: histogram of 1e6 samples matches integrated density") {
  const GaussianHead head = head1d(0.3, -0.2);
  constexpr std::size_t kSamples = 1000000;
  constexpr std::size_t kBins = 50;
  constexpr std::size_t kChunk = 100000;

  std::vector<std::size_t> counts(kBins, 0);
  Rng rng(777);
  for (std::size_t done = 0; done < kSamples; done += kChunk) {
    GaussianHead big{Tensor::full({kChunk, 1}, 0.3),
                     Tensor::full({kChunk, 1}, -0.2)};
    Tensor noise({kChunk, 1}, rng.normal_vector(kChunk));
    auto s = sample_reparameterized(big, noise);
    for (double a : s.action.data) {
      auto bin = static_cast<std::size_t>((a + 1.0) / 2.0 * kBins);
      if (bin >= kBins) bin = kBins - 1;
      ++counts[bin];
    }
  }

  std::size_t failing_bins = 0;
  for (std::size_t b = 0; b < kBins; ++b) {
    const double lo = -1.0 + 2.0 * static_cast<double>(b) / kBins;
    const double hi = lo + 2.0 / kBins;
    const double p = oracles::adaptive_simpson(
        [&](double a) { return density_at(head, a); },
        std::max(lo, -1.0 + 1e-12), std::min(hi, 1.0 - 1e-12), 1e-10);
    const double se = std::sqrt(p * (1.0 - p) * kSamples);
    const double observed = static_cast<double>(counts[b]);
    CAPTURE(b);
    if (std::abs(observed - p * kSamples) > 3.0 * std::max(se, 1.0))
      ++failing_bins;
  }
  CHECK(failing_bins == 0);
}

TEST_CASE("reparameterization gradient matches quadrature + finite diff") {
  // Q(a) = -a^2; F(m) = E[Q(a) - log pi(a)] with fixed log_std.
  const double m0 = 0.4, ls = -0.3;
  constexpr std::size_t kN = 100000;

  // Path-gradient estimate of dF/dm and its standard error.
  Rng rng(9090);
  Graph g;
  ValueId mean = g.leaf(Tensor::full({kN, 1}, m0));
  ValueId log_std = g.leaf(Tensor::full({kN, 1}, ls));
  Tensor noise({kN, 1}, rng.normal_vector(kN));
  SquashedSample s = sample_squashed(g, mean, log_std, std::move(noise));
  ValueId value =
      g.sub(g.mul_scalar(g.square(s.action), -1.0), s.log_prob);
  g.backward(g.mean(value));
  const Tensor gm = g.grad(mean);
  double estimate = 0.0;
  for (double v : gm.data) estimate += v;
  double var = 0.0;
  for (double v : gm.data) {
    const double per_sample = v * static_cast<double>(kN);
    var += (per_sample - estimate) * (per_sample - estimate);
  }
  var /= static_cast<double>(kN) * static_cast<double>(kN - 1);
  const double se = std::sqrt(var);

  // Quadrature oracle: F(m) by adaptive Simpson, then a central difference.
  auto objective = [&](double m) {
    GaussianHead head = head1d(m, ls);
    auto f = [&](double a) {
      const double p = density_at(head, a);
      if (p <= 0.0) return 0.0;
      return p * (-a * a - std::log(p));
    };
    return oracles::adaptive_simpson(f, -1.0 + 1e-12, 1.0 - 1e-12, 1e-10);
  };
  const double h = 1e-4;
  const double reference = (objective(m0 + h) - objective(m0 - h)) / (2.0 * h);

  CAPTURE(estimate);
  CAPTURE(reference);
  CAPTURE(se);
  CHECK(std::abs(estimate - reference) <= 2.0 * se);
}
