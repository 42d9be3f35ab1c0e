#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sac/tensor.hpp"

namespace sac {

/// Handle to a value recorded on a Graph.
struct ValueId {
  std::uint32_t index = 0;
};

/// Reverse-mode tape over dense tensors.
///
/// Every operation appends a node whose inputs precede it, so insertion
/// order is a topological order and one reverse sweep from the loss node
/// computes gradients for every reachable leaf. Graphs are built fresh for
/// each loss evaluation and thrown away; nothing persists across steps.
///
/// Op vocabulary: affine, relu, tanh, exp, log, softplus, elementwise
/// add/sub/mul, minimum of two tensors, scalar add/mul, clamp, square,
/// sum, mean, row_sum, concat_cols.
class Graph {
 public:
  Graph() { nodes_.reserve(64); }

  /// Inserts a leaf holding a copy of `t`. Leaves are both parameters and
  /// constants; callers decide which gradients to harvest after backward().
  ValueId leaf(Tensor t);
  ValueId leaf_scalar(double v) { return leaf(Tensor::scalar(v)); }

  // y = x W + b with x: B x I, W: I x O, b: {O} broadcast over rows.
  ValueId affine(ValueId x, ValueId w, ValueId b);

  ValueId relu(ValueId x);
  ValueId tanh(ValueId x);
  ValueId exp(ValueId x);
  ValueId log(ValueId x);
  ValueId softplus(ValueId x);
  ValueId square(ValueId x);
  ValueId clamp(ValueId x, double lo, double hi);

  ValueId add(ValueId a, ValueId b);
  ValueId sub(ValueId a, ValueId b);
  ValueId mul(ValueId a, ValueId b);
  /// Elementwise minimum; on ties the gradient goes to the first input.
  ValueId minimum(ValueId a, ValueId b);

  ValueId add_scalar(ValueId x, double c);
  ValueId mul_scalar(ValueId x, double c);

  ValueId sum(ValueId x);      // -> 1x1
  ValueId mean(ValueId x);     // -> 1x1
  ValueId row_sum(ValueId x);  // B x C -> B x 1
  ValueId concat_cols(ValueId a, ValueId b);

  /// Populates grad on every node's tensor (zero where unreachable).
  /// `loss` must be a single-element tensor.
  void backward(ValueId loss);

  const Tensor& value(ValueId id) const { return nodes_[id.index].value; }
  std::size_t node_count() const { return nodes_.size(); }

  /// Gradient of the last backward() w.r.t. node `id` as a plain tensor.
  Tensor grad(ValueId id) const;

 private:
  enum class Op : std::uint8_t {
    kLeaf,
    kAffine,
    kRelu,
    kTanh,
    kExp,
    kLog,
    kSoftplus,
    kSquare,
    kClamp,
    kAdd,
    kSub,
    kMul,
    kMin,
    kAddScalar,
    kMulScalar,
    kSum,
    kMean,
    kRowSum,
    kConcatCols,
  };

  struct Node {
    Op op = Op::kLeaf;
    std::array<std::uint32_t, 3> in{};
    std::uint8_t n_in = 0;
    double c0 = 0.0;  // scalar payload (add/mul scalar, clamp lo)
    double c1 = 0.0;  // clamp hi
    Tensor value;
  };

  ValueId push(Node n) {
    nodes_.push_back(std::move(n));
    return ValueId{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  ValueId unary(Op op, ValueId x, Tensor out, double c0 = 0.0, double c1 = 0.0);
  ValueId binary_elementwise(Op op, ValueId a, ValueId b);
  void backprop_node(std::uint32_t i);

  Node& node(ValueId id) { return nodes_[id.index]; }
  const Node& node(ValueId id) const { return nodes_[id.index]; }

  std::vector<Node> nodes_;
  std::vector<double> scratch_;  // transposed weights during backward
};

}  // namespace sac
