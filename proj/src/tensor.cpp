#include "simast/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "simast/error.hpp"
#include "simast/kernels.hpp"

namespace simast::ad {

using detail::Node;

std::string to_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

namespace {

thread_local bool g_grad_enabled = true;

std::size_t volume(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_rank(const Shape& shape) {
  if (shape.size() > 2) throw ShapeError("tensors of rank > 2 are not supported: " + to_string(shape));
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a.shape()) + " and " +
                   to_string(b.shape()));
}

Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                   std::initializer_list<const Tensor*> inputs, std::function<void(Node&)> bw) {
  for (double v : value) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite result");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  node->is_leaf = false;
  if (g_grad_enabled) {
    bool any = false;
    for (const Tensor* t : inputs) any = any || t->requires_grad();
    if (any) {
      node->requires_grad = true;
      for (const Tensor* t : inputs) node->parents.push_back(t->handle());
      node->backward = std::move(bw);
    }
  }
  return Tensor(std::move(node));
}

Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                   const std::vector<Tensor>& inputs, std::function<void(Node&)> bw) {
  for (double v : value) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite result");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  node->is_leaf = false;
  if (g_grad_enabled &&
      std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); })) {
    node->requires_grad = true;
    for (const Tensor& t : inputs) node->parents.push_back(t.handle());
    node->backward = std::move(bw);
  }
  return Tensor(std::move(node));
}

// Gradient buffer of parent i, or nullptr when it does not need one.
double* parent_grad(Node& self, std::size_t i) {
  Node& p = *self.parents[i];
  return p.requires_grad ? p.grad_buffer() : nullptr;
}

const std::vector<double>& parent_value(Node& self, std::size_t i) { return self.parents[i]->value; }

template <typename F, typename D>
Tensor unary(const char* op, const Tensor& a, F forward, D derivative) {
  std::vector<double> out(a.size());
  const auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = forward(in[i]);
  return make_result(op, a.shape(), out, {&a}, [derivative, out](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const auto& x = parent_value(self, 0);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += self.grad[i] * derivative(x[i], out[i]);
  });
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  check_rank(shape);
  auto node = std::make_shared<Node>();
  node->value.assign(volume(shape), 0.0);
  node->shape = std::move(shape);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  check_rank(shape);
  if (data.size() != volume(shape)) {
    throw ShapeError("data of length " + std::to_string(data.size()) + " does not fit shape " +
                     to_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

std::size_t Tensor::rows() const { return rank() == 2 ? shape()[0] : 1; }
std::size_t Tensor::cols() const { return rank() == 0 ? 1 : shape().back(); }

std::span<double> Tensor::mutable_data() {
  if (!node_->is_leaf) throw ShapeError("only leaf tensors can be modified in place");
  return node_->value;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::backward() const {
  if (size() != 1) throw ShapeError("backward() needs a scalar, got " + to_string(shape()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (!n->is_leaf) n->grad.assign(n->value.size(), 0.0);
  }
  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward) n->backward(*n);
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) shape_mismatch("matmul", a, b);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(m * n, 0.0);
  kernels::active().gemm_nn(m, k, n, a.data().data(), b.data().data(), out.data());
  return make_result("matmul", {m, n}, std::move(out), {&a, &b}, [m, k, n](Node& self) {
    const auto& kt = kernels::active();
    if (double* ga = parent_grad(self, 0)) {
      kt.gemm_nt(m, n, k, self.grad.data(), parent_value(self, 1).data(), ga);
    }
    if (double* gb = parent_grad(self, 1)) {
      kt.gemm_tn(k, m, n, parent_value(self, 0).data(), self.grad.data(), gb);
    }
  });
}

namespace {

enum class Broadcast { None, Row };

Broadcast broadcast_kind(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::None;
  const bool row_like = (b.rank() == 1 || (b.rank() == 2 && b.shape()[0] == 1));
  if (a.rank() == 2 && row_like && b.cols() == a.cols()) return Broadcast::Row;
  shape_mismatch(op, a, b);
}

Tensor add_sub(const char* op, const Tensor& a, const Tensor& b, double sign) {
  const Broadcast kind = broadcast_kind(op, a, b);
  const std::size_t cols = a.cols();
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += sign * bv[kind == Broadcast::Row ? i % cols : i];
  }
  return make_result(op, a.shape(), std::move(out), {&a, &b}, [kind, cols, sign](Node& self) {
    if (double* ga = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += self.grad[i];
    }
    if (double* gb = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        gb[kind == Broadcast::Row ? i % cols : i] += sign * self.grad[i];
      }
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return add_sub("add", a, b, 1.0); }
Tensor sub(const Tensor& a, const Tensor& b) { return add_sub("sub", a, b, -1.0); }

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch("mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result("mul", a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    const auto& av = parent_value(self, 0);
    const auto& bv = parent_value(self, 1);
    if (double* ga = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < av.size(); ++i) ga[i] += self.grad[i] * bv[i];
    }
    if (double* gb = parent_grad(self, 1)) {
      for (std::size_t i = 0; i < av.size(); ++i) gb[i] += self.grad[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  return make_result("scale", a.shape(), std::move(out), {&a}, [factor](Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += factor * self.grad[i];
    }
  });
}

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const std::size_t rows = parts[0].rows();
  const std::size_t rank = parts[0].rank();
  if (rank == 0) throw ShapeError("concat: scalars have no last axis");
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != rank || p.rows() != rows) shape_mismatch("concat", parts[0], p);
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto src = parts[k].data();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(src.begin() + r * widths[k], widths[k], out.begin() + r * total + offset);
    }
    offset += widths[k];
  }
  Shape shape = rank == 1 ? Shape{total} : Shape{rows, total};
  return make_result("concat", std::move(shape), std::move(out), parts,
                     [widths, rows, total](Node& self) {
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < widths.size(); ++k) {
                         if (double* g = parent_grad(self, k)) {
                           for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t c = 0; c < widths[k]; ++c) {
                               g[r * widths[k] + c] += self.grad[r * total + offset + c];
                             }
                           }
                         }
                         offset += widths[k];
                       }
                     });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t cols = parts[0].cols();
  std::vector<std::size_t> sizes;
  std::size_t rows = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != parts[0].rank() || p.cols() != cols || p.rank() == 0) {
      shape_mismatch("concat_rows", parts[0], p);
    }
    sizes.push_back(p.size());
    rows += p.rows();
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const Tensor& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
  return make_result("concat_rows", {rows, cols}, std::move(out), parts, [sizes](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (double* g = parent_grad(self, k)) {
        for (std::size_t i = 0; i < sizes[k]; ++i) g[i] += self.grad[offset + i];
      }
      offset += sizes[k];
    }
  });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  if (a.rank() == 0) throw ShapeError("slice: cannot slice a scalar");
  const bool by_rows = axis == 0 && a.rank() == 2;
  if (axis > 1 || (axis == 1 && a.rank() != 2 && a.rank() != 1)) {
    throw ShapeError("slice: bad axis for shape " + to_string(a.shape()));
  }
  const std::size_t extent = by_rows ? a.rows() : a.cols();
  if (begin > end || end > extent) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of bounds for shape " + to_string(a.shape()));
  }
  const std::size_t rows = a.rows(), cols = a.cols();
  const auto in = a.data();
  std::vector<double> out;
  Shape shape;
  std::size_t col0 = 0, width = cols;
  if (by_rows) {
    out.assign(in.begin() + begin * cols, in.begin() + end * cols);
    shape = {end - begin, cols};
  } else {
    col0 = begin;
    width = end - begin;
    out.reserve(rows * width);
    for (std::size_t r = 0; r < rows; ++r) {
      out.insert(out.end(), in.begin() + r * cols + begin, in.begin() + r * cols + end);
    }
    shape = a.rank() == 1 ? Shape{width} : Shape{rows, width};
  }
  const std::size_t row0 = by_rows ? begin : 0;
  const std::size_t out_rows = by_rows ? end - begin : rows;
  return make_result("slice", std::move(shape), std::move(out), {&a},
                     [row0, col0, width, out_rows, cols](Node& self) {
                       double* g = parent_grad(self, 0);
                       if (!g) return;
                       for (std::size_t r = 0; r < out_rows; ++r) {
                         for (std::size_t c = 0; c < width; ++c) {
                           g[(row0 + r) * cols + col0 + c] += self.grad[r * width + c];
                         }
                       }
                     });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  return slice(a, 0, begin, end);
}
Tensor slice_cols(const Tensor& a, std::size_t begin, std::size_t end) {
  return slice(a, 1, begin, end);
}

Tensor element(const Tensor& a, std::size_t index) {
  if (index >= a.size()) throw ShapeError("element: index out of range for " + to_string(a.shape()));
  return make_result("element", {}, {a.data()[index]}, {&a}, [index](Node& self) {
    if (double* g = parent_grad(self, 0)) g[index] += self.grad[0];
  });
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw ShapeError("transpose needs rank 2, got " + to_string(a.shape()));
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
  return make_result("transpose", {n, m}, std::move(out), {&a}, [m, n](Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
    }
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  check_rank(shape);
  if (volume(shape) != a.size()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result("reshape", std::move(shape), std::move(out), {&a}, [](Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_result("sum", {}, {s}, {&a}, [](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const std::size_t n = self.parents[0]->value.size();
    for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
  });
}

Tensor sum_rows(const Tensor& a) {
  if (a.rank() != 2) throw ShapeError("sum_rows needs rank 2, got " + to_string(a.shape()));
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += a.data()[i * n + j];
  return make_result("sum_rows", {n}, std::move(out), {&a}, [m, n](Node& self) {
    if (double* g = parent_grad(self, 0)) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j];
    }
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw ShapeError("mean of an empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary(
      "leaky_relu", a, [slope](double x) { return x > 0 ? x : slope * x; },
      [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Tensor log(const Tensor& a) {
  for (double v : a.data()) {
    if (!(v > 0)) throw NumericError("log of a non-positive value");
  }
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor softmax(const Tensor& a) {
  if (a.rank() == 0) throw ShapeError("softmax needs at least one axis");
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = a.data().data() + r * cols;
    double* y = out.data() + r * cols;
    const double mx = *std::max_element(x, x + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) z += (y[c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) y[c] /= z;
  }
  return make_result("softmax", a.shape(), out, {&a}, [rows, cols, out](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = out.data() + r * cols;
      const double* gy = self.grad.data() + r * cols;
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += gy[c] * y[c];
      for (std::size_t c = 0; c < cols; ++c) g[r * cols + c] += y[c] * (gy[c] - dot);
    }
  });
}

Tensor l2_norm_squared(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return make_result("l2_norm_squared", {}, {s}, {&a}, [](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const auto& x = parent_value(self, 0);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += 2.0 * x[i] * self.grad[0];
  });
}

Tensor spmm(const SparseMatrix& lhs, const Tensor& h) {
  if (h.rank() != 2 || h.rows() != lhs.rows) {
    throw ShapeError("spmm: " + std::to_string(lhs.rows) + "x" + std::to_string(lhs.rows) +
                     " sparse matrix cannot multiply " + to_string(h.shape()));
  }
  const std::size_t k = h.cols();
  std::vector<double> out(lhs.rows * k, 0.0);
  const auto& kt = kernels::active();
  for (std::size_t i = 0; i < lhs.rows; ++i) {
    for (std::size_t e = lhs.row_begin[i]; e < lhs.row_begin[i + 1]; ++e) {
      kt.axpy(lhs.values[e], h.data().data() + lhs.cols[e] * k, out.data() + i * k, k);
    }
  }
  return make_result("spmm", {lhs.rows, k}, std::move(out), {&h}, [lhs, k](Node& self) {
    double* g = parent_grad(self, 0);
    if (!g) return;
    const auto& kt = kernels::active();
    for (std::size_t i = 0; i < lhs.rows; ++i) {
      for (std::size_t e = lhs.row_begin[i]; e < lhs.row_begin[i + 1]; ++e) {
        kt.axpy(lhs.values[e], self.grad.data() + i * k, g + lhs.cols[e] * k, k);
      }
    }
  });
}

}  // namespace simast::ad
