#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "simast/ast.hpp"
#include "simast/tensor.hpp"

namespace simast::testing {

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

inline ad::Tensor random_tensor(std::mt19937_64& rng, ad::Shape shape, bool requires_grad = true,
                                double range = 1.0) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return ad::Tensor::from(std::move(shape), random_vector(rng, n, -range, range), requires_grad);
}

// Random tree with up to max_nodes nodes. Attribute labels mix kept and
// removable names so simplification has work to do.
inline AstNode random_tree(std::mt19937_64& rng, std::size_t max_nodes) {
  static const std::vector<std::string> kAttributes = {
      "MethodDeclaration", "IfStatement", "modifiers", "BinaryOperation", "MemberReference",
      "LocalVariableDeclaration", "Literal", "ReturnStatement", "FormalParameter", "Wrapper",
      "BlockStatement", "MethodInvocation"};
  static const std::vector<std::string> kCodes = {"a", "b", "x", "0", "1", "+", "==", "static", "f"};
  const std::size_t target = 1 + rng() % max_nodes;
  AstNode root = AstNode::attribute("MethodDeclaration");
  std::size_t count = 1;
  while (count < target) {
    std::vector<AstNode*> attrs;
    std::function<void(AstNode&)> collect = [&](AstNode& n) {
      if (!n.is_code()) attrs.push_back(&n);
      for (auto& c : n.children) collect(c);
    };
    collect(root);
    AstNode* parent = attrs[rng() % attrs.size()];
    if (rng() % 2 == 0) parent->children.push_back(AstNode::code(kCodes[rng() % kCodes.size()]));
    else parent->children.push_back(AstNode::attribute(kAttributes[rng() % kAttributes.size()]));
    ++count;
  }
  return root;
}

struct GradCheck {
  std::size_t checked = 0;
  std::size_t failed = 0;
  double worst_abs = 0.0;
  double worst_rel = 0.0;
  std::string first_failure;
};

// Compares the analytic gradient of loss() with central differences for
// every entry of every parameter. An entry passes when the absolute error is
// within abs_tol or the relative error within rel_tol.
inline GradCheck check_gradients(const std::function<ad::Tensor()>& loss, std::vector<ad::Tensor> params,
                                 double step = 1e-5, double rel_tol = 1e-4, double abs_tol = 1e-6) {
  for (auto& p : params) p.zero_grad();
  loss().backward();
  GradCheck out;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto data = params[k].mutable_data();
    const std::vector<double> analytic(params[k].grad().begin(), params[k].grad().end());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      double plus, minus;
      {
        ad::NoGradGuard guard;
        data[i] = saved + step;
        plus = loss().item();
        data[i] = saved - step;
        minus = loss().item();
      }
      data[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = analytic.empty() ? 0.0 : analytic[i];
      const double abs_err = std::fabs(a - numeric);
      const double rel_err = abs_err / std::max(std::fabs(a), std::fabs(numeric));
      ++out.checked;
      out.worst_abs = std::max(out.worst_abs, abs_err);
      if (abs_err > abs_tol) out.worst_rel = std::max(out.worst_rel, rel_err);
      if (abs_err > abs_tol && rel_err > rel_tol) {
        if (out.failed++ == 0) {
          out.first_failure = "param " + std::to_string(k) + " entry " + std::to_string(i) +
                              ": analytic " + std::to_string(a) + " numeric " + std::to_string(numeric);
        }
      }
    }
  }
  for (auto& p : params) p.zero_grad();
  return out;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace simast::testing
