#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sac {

/// Dense row-major tensor of doubles with optional gradient storage.
/// Rank 1 and rank 2 cover everything this library needs; the shape is
/// kept generic so biases ({n}) and matrices ({rows, cols}) share one type.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::optional<std::vector<double>> grad;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_, std::vector<double> data_)
      : shape(std::move(shape_)), data(std::move(data_)) {
    if (element_count(shape) != data.size())
      throw std::invalid_argument("Tensor: shape/data size mismatch");
  }

  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
      if (d == 0) throw std::invalid_argument("Tensor: zero dimension");
      n *= d;
    }
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    std::size_t n = element_count(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
  }

  static Tensor full(std::vector<std::size_t> shape, double v) {
    std::size_t n = element_count(shape);
    return Tensor(std::move(shape), std::vector<double>(n, v));
  }

  static Tensor scalar(double v) { return Tensor({1, 1}, {v}); }

  /// Column vector {n, 1} from raw values.
  static Tensor column(const std::vector<double>& v) {
    return Tensor({v.size(), 1}, v);
  }

  /// Single row {1, n} from raw values.
  static Tensor row(const std::vector<double>& v) {
    return Tensor({1, v.size()}, v);
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t rows() const {
    require_rank2("rows");
    return shape[0];
  }
  std::size_t cols() const {
    require_rank2("cols");
    return shape[1];
  }

  double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  void require_rank2(const char* who) const {
    if (shape.size() != 2)
      throw std::invalid_argument(std::string(who) + ": tensor is not rank 2");
  }

  /// Ensures grad exists, zeroed, same length as data.
  std::vector<double>& ensure_grad() {
    if (!grad || grad->size() != data.size())
      grad.emplace(data.size(), 0.0);
    else
      std::fill(grad->begin(), grad->end(), 0.0);
    return *grad;
  }
};

inline std::string shape_string(const Tensor& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape[i]);
  }
  return s + ")";
}

}  // namespace sac
