#include "simast/graph.hpp"

#include <cmath>
#include <utility>

#include "simast/error.hpp"

namespace simast {

NodeSequence serialize(const Ast& ast) {
  NodeSequence seq;
  const std::size_t n = ast.node_count();
  seq.labels.reserve(n);
  seq.parents.reserve(n);
  seq.kinds.reserve(n);

  struct Frame {
    const AstNode* node;
    std::size_t parent;
  };
  std::vector<Frame> stack{{&ast.root(), kNoParent}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const std::size_t index = seq.labels.size();
    seq.labels.push_back(f.node->label);
    seq.parents.push_back(f.parent);
    seq.kinds.push_back(f.node->kind);
    for (auto it = f.node->children.rbegin(); it != f.node->children.rend(); ++it) {
      stack.push_back({&*it, index});
    }
  }
  return seq;
}

FragmentGraph build_graph(std::vector<std::string> labels, std::vector<std::size_t> parents,
                          Normalization normalization) {
  const std::size_t n = labels.size();
  if (n == 0) throw DataError("fragment graph needs at least one node");
  if (parents.size() != n) {
    throw DataError("parents has " + std::to_string(parents.size()) + " entries for " +
                    std::to_string(n) + " labels");
  }
  if (parents[0] != kNoParent) throw DataError("first node must be the root");
  for (std::size_t i = 1; i < n; ++i) {
    if (parents[i] >= i) {
      throw DataError("parent of node " + std::to_string(i) + " must precede it");
    }
  }

  FragmentGraph g;
  g.labels_ = std::move(labels);
  g.parents_ = std::move(parents);
  g.adjacency_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    g.adjacency_[i * n + i] = 1;
    if (i > 0) {
      const std::size_t p = g.parents_[i];
      g.adjacency_[i * n + p] = 1;
      g.adjacency_[p * n + i] = 1;
    }
  }

  g.degrees_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < n; ++j) d += g.adjacency_[i * n + j];
    g.degrees_[i] = static_cast<double>(d);
  }

  g.propagation_.assign(n * n, 0.0);
  g.sparse_.rows = n;
  g.sparse_.row_begin.assign(1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!g.adjacency_[i * n + j]) continue;
      const double v = normalization == Normalization::Row
                           ? 1.0 / (g.degrees_[i] + 1.0)
                           : 1.0 / std::sqrt(g.degrees_[i] * g.degrees_[j]);
      g.propagation_[i * n + j] = v;
      g.sparse_.cols.push_back(j);
      g.sparse_.values.push_back(v);
    }
    g.sparse_.row_begin.push_back(g.sparse_.cols.size());
  }
  return g;
}

}  // namespace simast
