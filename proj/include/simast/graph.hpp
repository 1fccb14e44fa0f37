#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "simast/ast.hpp"

namespace simast {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Pre-order node sequence of a tree with parent links.
struct NodeSequence {
  std::vector<std::string> labels;
  std::vector<std::size_t> parents;  // parents[0] == kNoParent, parents[i] < i otherwise
  std::vector<NodeKind> kinds;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Depth-first pre-order serialization, children in stored order.
NodeSequence serialize(const Ast& ast);

enum class Normalization {
  Row,        // L_ij = A_ij / (D_i + 1)
  Symmetric,  // L_ij = A_ij / sqrt(D_i * D_j)
};

/// Compressed-row view of the propagation matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_begin;  // size rows + 1
  std::vector<std::size_t> cols;
  std::vector<double> values;
};

/// Relation graph of one fragment: self-loops plus parent-child edges.
class FragmentGraph {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& parents() const noexcept { return parents_; }
  /// Row-major n x n, entries 0/1.
  const std::vector<std::uint8_t>& adjacency() const noexcept { return adjacency_; }
  /// Row-major n x n.
  const std::vector<double>& propagation() const noexcept { return propagation_; }
  const std::vector<double>& degrees() const noexcept { return degrees_; }
  const SparseMatrix& sparse_propagation() const noexcept { return sparse_; }

  std::uint8_t adjacency(std::size_t i, std::size_t j) const { return adjacency_[i * size() + j]; }
  double propagation(std::size_t i, std::size_t j) const { return propagation_[i * size() + j]; }

 private:
  friend FragmentGraph build_graph(std::vector<std::string>, std::vector<std::size_t>,
                                   Normalization);
  std::vector<std::string> labels_;
  std::vector<std::size_t> parents_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<double> propagation_;
  std::vector<double> degrees_;
  SparseMatrix sparse_;
};

/// Builds A (self-loops, parent-child edges), D (row sums of A, self-loop
/// included) and the propagation matrix L. Throws DataError when `parents`
/// is not a valid pre-order parent vector.
FragmentGraph build_graph(std::vector<std::string> labels, std::vector<std::size_t> parents,
                          Normalization normalization = Normalization::Row);

inline FragmentGraph build_graph(const NodeSequence& seq,
                                 Normalization normalization = Normalization::Row) {
  return build_graph(seq.labels, seq.parents, normalization);
}

}  // namespace simast
