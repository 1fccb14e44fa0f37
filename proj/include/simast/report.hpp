#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "simast/ast.hpp"

namespace simast {

struct PreprocessedPair;

/// Sizes of one fragment before and after simplification.
struct TreeSizes {
  std::size_t original_nodes = 0;
  std::size_t simplified_nodes = 0;
  std::size_t code_tokens = 0;
};

TreeSizes tree_sizes(const Ast& original, const Ast& simplified);

/// Both fragments of every pair. Throws DataError if a fragment's code
/// token count changed during preprocessing.
std::vector<TreeSizes> tree_sizes(std::span<const PreprocessedPair> pairs);

struct TreeStatsRow {
  std::size_t max_tokens = 0;
  double average_tokens = 0.0;
  double average_code_tokens = 0.0;
  double code_token_rate = 0.0;  // fraction
};

struct TreeStats {
  std::size_t fragments = 0;
  TreeStatsRow original;
  TreeStatsRow simplified;
  double simplified_rate = 0.0;      // fraction
  double percentage_increase = 0.0;  // percentage points
};

/// Throws DataError for an empty corpus or an empty tree.
TreeStats tree_stats(std::span<const TreeSizes> corpus);

double simplified_rate(double original_average, double simplified_average);
double code_token_rate(double average_code_tokens, double average_tokens);
/// Rates as fractions, result in percentage points.
double percentage_increase(double original_rate, double simplified_rate);

/// Two rows (Original, Simplified) under a header line.
void write_tree_stats_csv(std::ostream& out, const std::string& corpus_name, const TreeStats& stats);

}  // namespace simast
