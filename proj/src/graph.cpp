#include "sac/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace sac {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(who) + ": shape mismatch " +
                                shape_string(a) + " vs " + shape_string(b));
}

// log(1 + e^x) without overflow for large |x|.
double stable_softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

ValueId Graph::leaf(Tensor t) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(t);
  return push(std::move(n));
}

ValueId Graph::affine(ValueId x, ValueId w, ValueId b) {
  const Tensor& xv = node(x).value;
  const Tensor& wv = node(w).value;
  const Tensor& bv = node(b).value;
  xv.require_rank2("affine input");
  wv.require_rank2("affine weight");
  if (bv.rank() != 1)
    throw std::invalid_argument("affine bias must be rank 1");
  if (xv.cols() != wv.rows() || wv.cols() != bv.shape[0])
    throw std::invalid_argument("affine: incompatible shapes " +
                                shape_string(xv) + ", " + shape_string(wv) +
                                ", " + shape_string(bv));

  const std::size_t batch = xv.rows(), in = xv.cols(), out = wv.cols();
  Tensor y({batch, out}, std::vector<double>(batch * out));
  const double* xd = xv.data.data();
  const double* wd = wv.data.data();
  const double* bd = bv.data.data();
  double* yd = y.data.data();
  for (std::size_t i = 0; i < batch; ++i) {
    double* yrow = yd + i * out;
    for (std::size_t j = 0; j < out; ++j) yrow[j] = bd[j];
    const double* xrow = xd + i * in;
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xrow[k];
      const double* wrow = wd + k * out;
      for (std::size_t j = 0; j < out; ++j) yrow[j] += xk * wrow[j];
    }
  }

  Node n;
  n.op = Op::kAffine;
  n.in = {x.index, w.index, b.index};
  n.n_in = 3;
  n.value = std::move(y);
  return push(std::move(n));
}

ValueId Graph::unary(Op op, ValueId x, Tensor out, double c0, double c1) {
  Node n;
  n.op = op;
  n.in = {x.index, 0, 0};
  n.n_in = 1;
  n.c0 = c0;
  n.c1 = c1;
  n.value = std::move(out);
  return push(std::move(n));
}

ValueId Graph::relu(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
  out.grad.reset();
  return unary(Op::kRelu, x, std::move(out));
}

ValueId Graph::tanh(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = std::tanh(v);
  out.grad.reset();
  return unary(Op::kTanh, x, std::move(out));
}

ValueId Graph::exp(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = std::exp(v);
  out.grad.reset();
  return unary(Op::kExp, x, std::move(out));
}

ValueId Graph::log(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = std::log(v);
  out.grad.reset();
  return unary(Op::kLog, x, std::move(out));
}

ValueId Graph::softplus(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = stable_softplus(v);
  out.grad.reset();
  return unary(Op::kSoftplus, x, std::move(out));
}

ValueId Graph::square(ValueId x) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v = v * v;
  out.grad.reset();
  return unary(Op::kSquare, x, std::move(out));
}

ValueId Graph::clamp(ValueId x, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp: lo > hi");
  Tensor out = node(x).value;
  for (auto& v : out.data) v = v < lo ? lo : (v > hi ? hi : v);
  out.grad.reset();
  return unary(Op::kClamp, x, std::move(out), lo, hi);
}

ValueId Graph::binary_elementwise(Op op, ValueId a, ValueId b) {
  const Tensor& av = node(a).value;
  const Tensor& bv = node(b).value;
  check_same_shape(av, bv, "elementwise op");
  Tensor out = av;
  out.grad.reset();
  const double* bd = bv.data.data();
  switch (op) {
    case Op::kAdd:
      for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += bd[i];
      break;
    case Op::kSub:
      for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= bd[i];
      break;
    case Op::kMul:
      for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bd[i];
      break;
    case Op::kMin:
      for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = out.data[i] <= bd[i] ? out.data[i] : bd[i];
      break;
    default:
      throw std::logic_error("binary_elementwise: bad op");
  }
  Node n;
  n.op = op;
  n.in = {a.index, b.index, 0};
  n.n_in = 2;
  n.value = std::move(out);
  return push(std::move(n));
}

ValueId Graph::add(ValueId a, ValueId b) { return binary_elementwise(Op::kAdd, a, b); }
ValueId Graph::sub(ValueId a, ValueId b) { return binary_elementwise(Op::kSub, a, b); }
ValueId Graph::mul(ValueId a, ValueId b) { return binary_elementwise(Op::kMul, a, b); }
ValueId Graph::minimum(ValueId a, ValueId b) { return binary_elementwise(Op::kMin, a, b); }

ValueId Graph::add_scalar(ValueId x, double c) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v += c;
  out.grad.reset();
  return unary(Op::kAddScalar, x, std::move(out), c);
}

ValueId Graph::mul_scalar(ValueId x, double c) {
  Tensor out = node(x).value;
  for (auto& v : out.data) v *= c;
  out.grad.reset();
  return unary(Op::kMulScalar, x, std::move(out), c);
}

ValueId Graph::sum(ValueId x) {
  double s = 0.0;
  for (double v : node(x).value.data) s += v;
  return unary(Op::kSum, x, Tensor::scalar(s));
}

ValueId Graph::mean(ValueId x) {
  double s = 0.0;
  for (double v : node(x).value.data) s += v;
  return unary(Op::kMean, x,
               Tensor::scalar(s / static_cast<double>(node(x).value.size())));
}

ValueId Graph::row_sum(ValueId x) {
  const Tensor& xv = node(x).value;
  xv.require_rank2("row_sum");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor out({rows, 1}, std::vector<double>(rows, 0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += xv.data[i * cols + j];
    out.data[i] = s;
  }
  return unary(Op::kRowSum, x, std::move(out));
}

ValueId Graph::concat_cols(ValueId a, ValueId b) {
  const Tensor& av = node(a).value;
  const Tensor& bv = node(b).value;
  av.require_rank2("concat_cols");
  bv.require_rank2("concat_cols");
  if (av.rows() != bv.rows())
    throw std::invalid_argument("concat_cols: row count mismatch");
  const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out({rows, ca + cb}, std::vector<double>(rows * (ca + cb)));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < ca; ++j)
      out.data[i * (ca + cb) + j] = av.data[i * ca + j];
    for (std::size_t j = 0; j < cb; ++j)
      out.data[i * (ca + cb) + ca + j] = bv.data[i * cb + j];
  }
  Node n;
  n.op = Op::kConcatCols;
  n.in = {a.index, b.index, 0};
  n.n_in = 2;
  n.value = std::move(out);
  return push(std::move(n));
}

void Graph::backward(ValueId loss) {
  if (node(loss).value.size() != 1)
    throw std::invalid_argument("backward: loss must be a scalar (got " +
                                shape_string(node(loss).value) + ")");
  for (auto& n : nodes_) n.value.ensure_grad();
  (*node(loss).value.grad)[0] = 1.0;
  for (std::uint32_t i = loss.index + 1; i-- > 0;) backprop_node(i);
}

void Graph::backprop_node(std::uint32_t i) {
  Node& n = nodes_[i];
  if (n.op == Op::kLeaf) return;
  const std::vector<double>& g = *n.value.grad;
  const std::vector<double>& y = n.value.data;

  switch (n.op) {
    case Op::kAffine: {
      const Tensor& xv = nodes_[n.in[0]].value;
      const Tensor& wv = nodes_[n.in[1]].value;
      const std::size_t batch = xv.rows(), in = xv.cols(), out = wv.cols();
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gw = *nodes_[n.in[1]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[2]].value.grad;
      const double* xd = xv.data.data();
      const double* wd = wv.data.data();
      // gx accumulates along contiguous rows of W^T; the straightforward
      // dot-product form is a reduction the compiler may not vectorize.
      scratch_.assign(in * out, 0.0);
      for (std::size_t k = 0; k < in; ++k)
        for (std::size_t j = 0; j < out; ++j)
          scratch_[j * in + k] = wd[k * out + j];
      for (std::size_t b = 0; b < batch; ++b) {
        const double* grow = g.data() + b * out;
        const double* xrow = xd + b * in;
        double* gxrow = gx.data() + b * in;
        for (std::size_t j = 0; j < out; ++j) {
          const double gj = grow[j];
          const double* wtrow = scratch_.data() + j * in;
          for (std::size_t k = 0; k < in; ++k) gxrow[k] += gj * wtrow[k];
        }
        for (std::size_t k = 0; k < in; ++k) {
          const double xk = xrow[k];
          double* gwrow = gw.data() + k * out;
          for (std::size_t j = 0; j < out; ++j) gwrow[j] += xk * grow[j];
        }
        for (std::size_t j = 0; j < out; ++j) gb[j] += grow[j];
      }
      break;
    }
    case Op::kRelu: {
      const std::vector<double>& x = nodes_[n.in[0]].value.data;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (x[k] > 0.0) gx[k] += g[k];
      break;
    }
    case Op::kTanh: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k)
        gx[k] += g[k] * (1.0 - y[k] * y[k]);
      break;
    }
    case Op::kExp: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * y[k];
      break;
    }
    case Op::kLog: {
      const std::vector<double>& x = nodes_[n.in[0]].value.data;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] / x[k];
      break;
    }
    case Op::kSoftplus: {
      const std::vector<double>& x = nodes_[n.in[0]].value.data;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k)
        gx[k] += g[k] * sigmoid(x[k]);
      break;
    }
    case Op::kSquare: {
      const std::vector<double>& x = nodes_[n.in[0]].value.data;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k)
        gx[k] += 2.0 * x[k] * g[k];
      break;
    }
    case Op::kClamp: {
      const std::vector<double>& x = nodes_[n.in[0]].value.data;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (x[k] >= n.c0 && x[k] <= n.c1) gx[k] += g[k];
      break;
    }
    case Op::kAdd: {
      std::vector<double>& ga = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[1]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) {
        ga[k] += g[k];
        gb[k] += g[k];
      }
      break;
    }
    case Op::kSub: {
      std::vector<double>& ga = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[1]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) {
        ga[k] += g[k];
        gb[k] -= g[k];
      }
      break;
    }
    case Op::kMul: {
      const std::vector<double>& a = nodes_[n.in[0]].value.data;
      const std::vector<double>& b = nodes_[n.in[1]].value.data;
      std::vector<double>& ga = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[1]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) {
        ga[k] += g[k] * b[k];
        gb[k] += g[k] * a[k];
      }
      break;
    }
    case Op::kMin: {
      const std::vector<double>& a = nodes_[n.in[0]].value.data;
      const std::vector<double>& b = nodes_[n.in[1]].value.data;
      std::vector<double>& ga = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[1]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (a[k] <= b[k])
          ga[k] += g[k];
        else
          gb[k] += g[k];
      }
      break;
    }
    case Op::kAddScalar: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k];
      break;
    }
    case Op::kMulScalar: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * n.c0;
      break;
    }
    case Op::kSum: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      const double go = g[0];
      for (auto& v : gx) v += go;
      break;
    }
    case Op::kMean: {
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      const double go = g[0] / static_cast<double>(gx.size());
      for (auto& v : gx) v += go;
      break;
    }
    case Op::kRowSum: {
      const Tensor& xv = nodes_[n.in[0]].value;
      std::vector<double>& gx = *nodes_[n.in[0]].value.grad;
      const std::size_t rows = xv.rows(), cols = xv.cols();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] += g[r];
      break;
    }
    case Op::kConcatCols: {
      const Tensor& av = nodes_[n.in[0]].value;
      const Tensor& bv = nodes_[n.in[1]].value;
      std::vector<double>& ga = *nodes_[n.in[0]].value.grad;
      std::vector<double>& gb = *nodes_[n.in[1]].value.grad;
      const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < ca; ++j)
          ga[r * ca + j] += g[r * (ca + cb) + j];
        for (std::size_t j = 0; j < cb; ++j)
          gb[r * cb + j] += g[r * (ca + cb) + ca + j];
      }
      break;
    }
    case Op::kLeaf:
      break;
  }
}

Tensor Graph::grad(ValueId id) const {
  const Node& n = node(id);
  if (!n.value.grad)
    throw std::logic_error("grad: backward() has not been run");
  return Tensor(n.value.shape, *n.value.grad);
}

}  // namespace sac
