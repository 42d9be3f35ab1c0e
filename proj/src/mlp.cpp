#include "sac/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "sac/rng.hpp"

namespace sac {

void MlpSpec::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw std::invalid_argument("MlpSpec: dims must be >= 1");
  for (std::size_t h : hidden)
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
}

ParameterSet build_mlp(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParameterSet params;
  std::size_t in = spec.input_dim;
  std::vector<std::size_t> dims = spec.hidden;
  dims.push_back(spec.output_dim);
  for (std::size_t out : dims) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Tensor w({in, out}, std::vector<double>(in * out));
    for (auto& v : w.data) v = rng.uniform(-bound, bound);
    params.tensors.push_back(std::move(w));
    params.tensors.push_back(Tensor::zeros({out}));
    in = out;
  }
  return params;
}

std::vector<ValueId> insert_params(Graph& g, const ParameterSet& params) {
  std::vector<ValueId> ids;
  ids.reserve(params.tensors.size());
  for (const auto& t : params.tensors) ids.push_back(g.leaf(t));
  return ids;
}

ValueId mlp_forward(Graph& g, const MlpSpec& spec,
                    std::span<const ValueId> params, ValueId input) {
  if (params.size() != 2 * spec.layer_count())
    throw std::invalid_argument("mlp_forward: parameter count mismatch");
  if (g.value(input).cols() != spec.input_dim)
    throw std::invalid_argument("mlp_forward: input width " +
                                std::to_string(g.value(input).cols()) +
                                " != spec input_dim " +
                                std::to_string(spec.input_dim));
  ValueId h = input;
  for (std::size_t layer = 0; layer < spec.layer_count(); ++layer) {
    h = g.affine(h, params[2 * layer], params[2 * layer + 1]);
    if (layer + 1 < spec.layer_count()) h = g.relu(h);
  }
  return h;
}

Tensor mlp_eval(const MlpSpec& spec, const ParameterSet& params,
                const Tensor& input) {
  Graph g;
  auto ids = insert_params(g, params);
  ValueId out = mlp_forward(g, spec, ids, g.leaf(input));
  return g.value(out);
}

std::vector<Tensor> harvest_grads(const Graph& g,
                                  std::span<const ValueId> params) {
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (ValueId id : params) grads.push_back(g.grad(id));
  return grads;
}

}  // namespace sac
