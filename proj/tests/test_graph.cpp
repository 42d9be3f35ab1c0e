#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sac/finite_diff.hpp"
#include "sac/graph.hpp"
#include "sac/mlp.hpp"
#include "sac/rng.hpp"
#include "support/oracles.hpp"

using namespace sac;

TEST_CASE("forward: zero net maps anything to zero") {
  MlpSpec spec{3, {4, 4}, 2};
  ParameterSet params = build_mlp(spec, 1);
  for (auto& t : params.tensors)
    std::fill(t.data.begin(), t.data.end(), 0.0);
  Tensor out = mlp_eval(spec, params, Tensor({2, 3}, {1, -2, 3, 0.5, 4, -1}));
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("forward: identity affine layer passes input through") {
  MlpSpec spec{3, {}, 3};
  ParameterSet params = build_mlp(spec, 1);
  Tensor& w = params.tensors[0];
  std::fill(w.data.begin(), w.data.end(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) w.at(i, i) = 1.0;
  Tensor input({2, 3}, {1.0, -2.5, 3.0, 0.0, 7.0, -0.125});
  Tensor out = mlp_eval(spec, params, input);
  for (std::size_t i = 0; i < input.size(); ++i)
    CHECK(out.data[i] == input.data[i]);
}

TEST_CASE("forward matches straight-line matrix arithmetic") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    MlpSpec spec{1 + rng.uniform_index(5),
                 {1 + rng.uniform_index(8), 1 + rng.uniform_index(8)},
                 1 + rng.uniform_index(4)};
    ParameterSet params = build_mlp(spec, rng.next_u64());
    const std::size_t batch = 1 + rng.uniform_index(5);
    Tensor input({batch, spec.input_dim},
                 rng.normal_vector(batch * spec.input_dim));
    Tensor via_graph = mlp_eval(spec, params, input);
    Tensor naive = oracles::naive_mlp_forward(spec, params, input);
    REQUIRE(via_graph.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i)
      CHECK(via_graph.data[i] == doctest::Approx(naive.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("backward: loss = sum(params) gives unit gradients") {
  Graph g;
  ValueId w = g.leaf(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  ValueId b = g.leaf(Tensor({1, 3}, {7, 8, 9}));
  ValueId loss = g.add(g.sum(w), g.sum(b));
  g.backward(loss);
  for (double v : g.grad(w).data) CHECK(v == 1.0);
  for (double v : g.grad(b).data) CHECK(v == 1.0);
}

TEST_CASE("backward: grad of 0.5*|Wx|^2 is (Wx) x^T") {
  Rng rng(5);
  Tensor w({3, 3}, rng.normal_vector(9));
  std::vector<double> x = rng.normal_vector(3);
  Graph g;
  // Row-vector convention: y = x W, so d(0.5|y|^2)/dW = x^T y.
  ValueId wid = g.leaf(w);
  ValueId xid = g.leaf(Tensor({1, 3}, x));
  ValueId bias = g.leaf(Tensor::zeros({3}));
  ValueId y = g.affine(xid, wid, bias);
  ValueId loss = g.mul_scalar(g.sum(g.square(y)), 0.5);
  g.backward(loss);
  const Tensor yv = g.value(y);
  const Tensor gw = g.grad(wid);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(gw.at(i, j) == doctest::Approx(x[i] * yv.data[j]).epsilon(1e-12));
}

TEST_CASE("backward: untouched parameters get zero gradient") {
  Graph g;
  ValueId used = g.leaf(Tensor::scalar(2.0));
  ValueId unused = g.leaf(Tensor({2, 2}, {1, 2, 3, 4}));
  ValueId loss = g.square(used);
  g.backward(loss);
  for (double v : g.grad(unused).data) CHECK(v == 0.0);
  CHECK(g.grad(used).data[0] == doctest::Approx(4.0));
}

TEST_CASE("backward rejects non-scalar loss") {
  Graph g;
  ValueId x = g.leaf(Tensor({2, 2}, {1, 2, 3, 4}));
  CHECK_THROWS_AS(g.backward(g.square(x)), std::invalid_argument);
}

TEST_CASE("op shape validation") {
  Graph g;
  ValueId a = g.leaf(Tensor({2, 2}, {1, 2, 3, 4}));
  ValueId b = g.leaf(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  CHECK_THROWS_AS(g.add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(g.minimum(a, b), std::invalid_argument);
  ValueId bias = g.leaf(Tensor::zeros({4}));
  CHECK_THROWS_AS(g.affine(a, b, bias), std::invalid_argument);
}

TEST_CASE("gradient property: 100 random graphs vs finite differences") {
  // Dims <= 8, hidden <= 16, composite losses over the op vocabulary.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double err = oracles::mlp_gradient_check(seed);
    CAPTURE(seed);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("linearity of backward on a shared graph") {
  Rng rng(17);
  MlpSpec spec{3, {5}, 2};
  ParameterSet params = build_mlp(spec, 3);
  Tensor input({2, 3}, rng.normal_vector(6));
  const double a = 1.75, b = -0.4;

  auto grads_for = [&](double ca, double cb) {
    Graph g;
    auto ids = insert_params(g, params);
    ValueId y = mlp_forward(g, spec, ids, g.leaf(input));
    ValueId l1 = g.mean(g.square(y));
    ValueId l2 = g.sum(g.tanh(y));
    ValueId loss = g.add(g.mul_scalar(l1, ca), g.mul_scalar(l2, cb));
    g.backward(loss);
    return harvest_grads(g, ids);
  };

  auto combined = grads_for(a, b);
  auto only1 = grads_for(1.0, 0.0);
  auto only2 = grads_for(0.0, 1.0);
  for (std::size_t i = 0; i < combined.size(); ++i)
    for (std::size_t k = 0; k < combined[i].data.size(); ++k)
      CHECK(combined[i].data[k] ==
            doctest::Approx(a * only1[i].data[k] + b * only2[i].data[k])
                .epsilon(1e-10));
}

TEST_CASE("determinism: same seed, bit-identical forward and backward") {
  auto run = [] {
    MlpSpec spec{4, {8, 8}, 2};
    ParameterSet params = build_mlp(spec, 42);
    Rng rng(7);
    Tensor input({3, 4}, rng.normal_vector(12));
    Graph g;
    auto ids = insert_params(g, params);
    ValueId loss = g.mean(g.square(mlp_forward(g, spec, ids, g.leaf(input))));
    g.backward(loss);
    auto grads = harvest_grads(g, ids);
    std::vector<double> flat{g.value(loss).data[0]};
    for (const auto& t : grads)
      flat.insert(flat.end(), t.data.begin(), t.data.end());
    return flat;
  };
  auto r1 = run();
  auto r2 = run();
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
}

TEST_CASE("finite entries after ops on finite inputs") {
  Rng rng(23);
  Graph g;
  ValueId x = g.leaf(Tensor({4, 4}, rng.normal_vector(16)));
  ValueId big = g.mul_scalar(x, 100.0);
  for (ValueId v : {g.tanh(big), g.softplus(big), g.relu(big),
                    g.clamp(big, -1e6, 1e6), g.square(x)})
    for (double d : g.value(v).data) CHECK(std::isfinite(d));
}

TEST_CASE("finite_diff_grad basics") {
  // f(x) = x^2 at x = 3.
  ParameterSet p;
  p.tensors.push_back(Tensor::scalar(3.0));
  auto square_f = [](const ParameterSet& q) {
    return q.tensors[0].data[0] * q.tensors[0].data[0];
  };
  auto g = finite_diff_grad(square_f, p, 1e-5);
  CHECK(g[0].data[0] == doctest::Approx(6.0).epsilon(1e-8));

  auto const_f = [](const ParameterSet&) { return 41.5; };
  auto gz = finite_diff_grad(const_f, p, 1e-5);
  CHECK(std::abs(gz[0].data[0]) <= 1e-10);

  CHECK_THROWS_AS(finite_diff_grad(square_f, p, 0.0), std::invalid_argument);
}
