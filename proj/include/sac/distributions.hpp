#pragma once

#include "sac/graph.hpp"
#include "sac/tensor.hpp"

namespace sac {

/// log-std is clamped to this range before any use; keeps the variance
/// away from collapse and overflow.
inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Squashed actions are kept at distance >= this from the +-1 endpoints.
/// tanh rounds to exactly 1.0 in double precision past |u| ~ 19; the
/// clamp preserves the strict (-1, 1) support contract.
inline constexpr double kSquashMargin = 1e-12;

/// Diagonal Gaussian over pre-squash space: one mean and one log-std per
/// action coordinate, batch rows independent.
struct GaussianHead {
  Tensor mean;     // B x D
  Tensor log_std;  // B x D
};

/// Result of one reparameterized draw, with the tanh squash applied.
/// All coordinates of `action` lie strictly inside (-1, 1).
struct SquashedSample {
  Tensor noise;       // the standard-normal draw that produced it
  ValueId pre_squash; // u = mean + exp(log_std) * noise
  ValueId action;     // tanh(u)
  ValueId log_prob;   // B x 1
};

// Graph-recorded primitives (gradients flow into mean / log_std).

ValueId clamp_log_std(Graph& g, ValueId log_std);

/// u = mean + exp(clamp(log_std)) * noise; action = tanh(u); log_prob at u.
SquashedSample sample_squashed(Graph& g, ValueId mean, ValueId log_std,
                               Tensor noise);

/// Log-density of the squashed variable a = tanh(u), evaluated at u:
///   log pi(a|s) = log N(u; mean, std) - sum_i log(1 - tanh^2(u_i))
/// with the correction computed as 2 (log 2 - u - softplus(-2u)), which
/// stays finite where the naive form underflows.
ValueId squashed_log_prob(Graph& g, ValueId mean, ValueId log_std, ValueId u);

// Plain-tensor convenience wrappers (build a throwaway graph inside).

struct SampleValues {
  Tensor noise;
  Tensor pre_squash;
  Tensor action;
  Tensor log_prob;
};

SampleValues sample_reparameterized(const GaussianHead& head,
                                    const Tensor& noise);
Tensor log_prob_squashed(const GaussianHead& head, const Tensor& u);

/// tanh(mean) -- the deterministic evaluation action.
Tensor mean_action(const GaussianHead& head);

}  // namespace sac
