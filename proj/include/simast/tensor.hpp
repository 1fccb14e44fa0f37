#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "simast/graph.hpp"

// Minimal dense tensor with reverse-mode gradients. Tensors are rank 0, 1 or
// 2, row-major doubles. A rank-1 tensor of length n is viewed as a 1 x n row
// wherever an operation needs rows and columns.

namespace simast::ad {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated on first use
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
  const char* op = "leaf";

  double* grad_buffer() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    return grad.data();
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  /// Throws ShapeError when data.size() does not match the shape.
  static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const { return node_->value; }
  /// Mutable access for leaves (parameters, inputs).
  std::span<double> mutable_data();
  double item() const;
  double at(std::size_t row, std::size_t col) const { return node_->value[row * cols() + col]; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() == node_->value.size() && size() > 0; }
  /// Accumulated gradient; empty when none has been computed yet.
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return {node_->grad_buffer(), node_->value.size()}; }
  void zero_grad();

  /// Back-propagates from this scalar. Leaf gradients accumulate across
  /// calls; intermediate gradients are recomputed. Throws ShapeError when
  /// the tensor is not a scalar.
  void backward() const;

  detail::Node* node() const noexcept { return node_.get(); }
  const std::shared_ptr<detail::Node>& handle() const noexcept { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

Tensor matmul(const Tensor& a, const Tensor& b);
/// Same shape, or b broadcast over the leading axis of a ({n} or {1, n}).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// Concatenation along the last axis.
Tensor concat(const std::vector<Tensor>& parts);
/// Stacks rank-1 tensors, or concatenates rank-2 tensors, along the first axis.
Tensor concat_rows(const std::vector<Tensor>& parts);
/// Half-open range [begin, end) along `axis` (0 = rows, 1 = last axis).
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end);
Tensor element(const Tensor& a, std::size_t index);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);
Tensor sum(const Tensor& a);
/// Sum over the first axis: {m, n} -> {n}.
Tensor sum_rows(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor log(const Tensor& a);
/// Elementwise clamp; the gradient is zero where the bound is active.
Tensor clamp(const Tensor& a, double lo, double hi);
/// Row-wise softmax over the last axis.
Tensor softmax(const Tensor& a);
Tensor l2_norm_squared(const Tensor& a);
/// Sparse constant matrix times dense h: {rows, k}.
Tensor spmm(const SparseMatrix& lhs, const Tensor& h);

}  // namespace simast::ad
