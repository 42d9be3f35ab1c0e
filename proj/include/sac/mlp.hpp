#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sac/graph.hpp"
#include "sac/tensor.hpp"

namespace sac {

enum class Nonlinearity { kRelu };

/// Fully-connected network description: input -> hidden... -> output with
/// the nonlinearity after every hidden layer and a linear output layer.
struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
  Nonlinearity nonlinearity = Nonlinearity::kRelu;

  std::size_t layer_count() const { return hidden.size() + 1; }
  void validate() const;
};

/// Ordered collection of tensors: W0, b0, W1, b1, ... for an MLP, or any
/// other fixed layout a network builder chooses.
struct ParameterSet {
  std::vector<Tensor> tensors;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
  }
};

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
/// Same seed, same parameters, bit for bit.
ParameterSet build_mlp(const MlpSpec& spec, std::uint64_t seed);

/// Inserts every tensor of `params` as a graph leaf; returns the ids in
/// the same order so gradients can be harvested positionally.
std::vector<ValueId> insert_params(Graph& g, const ParameterSet& params);

/// Records the affine/relu chain on the graph. `params` are the ids from
/// insert_params for a parameter set built against the same spec.
ValueId mlp_forward(Graph& g, const MlpSpec& spec,
                    std::span<const ValueId> params, ValueId input);

/// Forward pass without retaining a caller-visible graph.
Tensor mlp_eval(const MlpSpec& spec, const ParameterSet& params,
                const Tensor& input);

/// Gradients of the last backward() for the given leaf ids, in order.
std::vector<Tensor> harvest_grads(const Graph& g,
                                  std::span<const ValueId> params);

}  // namespace sac
