#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "simast/ast.hpp"
#include "simast/graph.hpp"
#include "simast/parser.hpp"
#include "simast/simplify.hpp"

namespace simast {

/// A fragment arrives either as raw source or as an interchange AST.
using Fragment = std::variant<SourceFragment, Ast>;

/// One (original, revised, label) review sample; label 0 = rejected, 1 = accepted.
struct ReviewRecord {
  std::string id;
  Fragment original;
  Fragment revised;
  int label = 0;
};

/// Reads one JSON object per line:
///   {"id": str, "original": ..., "revised": ..., "label": 0|1, "format": "source"|"ast"}
/// With format "source" (the default) fragments are strings; with "ast" they
/// are interchange objects. Blank lines are skipped. Throws DataError naming
/// the offending line.
std::vector<ReviewRecord> load_jsonl(const std::filesystem::path& path);
std::vector<ReviewRecord> read_jsonl(std::istream& in);
/// Inverse of read_jsonl. Both fragments of a record must share a format.
void write_jsonl(std::ostream& out, const std::vector<ReviewRecord>& records);

struct PreprocessOptions {
  bool simplify = true;
  KeepRule keep_rule;
};

/// Node sequence of one fragment plus the size of its tree before simplification.
struct PreprocessedFragment {
  NodeSequence sequence;
  std::size_t source_nodes = 0;
  std::size_t source_code_tokens = 0;
};

struct PreprocessedPair {
  std::string id;
  PreprocessedFragment original;
  PreprocessedFragment revised;
  int label = 0;
};

Ast to_ast(const Fragment& fragment);
PreprocessedFragment preprocess_fragment(const Fragment& fragment, const PreprocessOptions& options);
PreprocessedPair preprocess_record(const ReviewRecord& record, const PreprocessOptions& options);
/// Order-preserving; fragments are processed on up to `threads` workers.
std::vector<PreprocessedPair> preprocess_all(const std::vector<ReviewRecord>& records,
                                             const PreprocessOptions& options,
                                             std::size_t threads = 1);

// Preprocessed file: one fragment per line, original then revised, e.g.
//   {"id":"r1","role":"original","label":1,"labels":[...],"parents":[-1,0,...],
//    "kinds":"acc...","source_nodes":17,"source_code_tokens":8}
void write_pairs(std::ostream& out, const std::vector<PreprocessedPair>& pairs);
void save_pairs(const std::filesystem::path& path, const std::vector<PreprocessedPair>& pairs);
std::vector<PreprocessedPair> read_pairs(std::istream& in);
std::vector<PreprocessedPair> load_pairs(const std::filesystem::path& path);

/// Graphs ready for the encoder.
struct PreparedPair {
  std::string id;
  FragmentGraph original;
  FragmentGraph revised;
  int label = 0;
};

std::vector<PreparedPair> prepare(const std::vector<PreprocessedPair>& pairs,
                                  Normalization normalization = Normalization::Row);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class split keyed on record id: each class's ids are sorted, shuffled
/// with `seed`, and the first round(fraction * class size) go to train.
/// Indices keep input order. Throws DataError for duplicate ids, a fraction
/// outside (0, 1) or an empty side.
SplitIndices stratified_split(const std::vector<std::string>& ids, const std::vector<int>& labels,
                              double train_fraction, std::uint64_t seed);

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

template <typename T>
Split<T> stratified_split(const std::vector<T>& items, double train_fraction, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& item : items) {
    ids.push_back(item.id);
    labels.push_back(item.label);
  }
  const SplitIndices idx = stratified_split(ids, labels, train_fraction, seed);
  Split<T> out;
  for (std::size_t i : idx.train) out.train.push_back(items[i]);
  for (std::size_t i : idx.test) out.test.push_back(items[i]);
  return out;
}

struct ClassWeights {
  double weight_o = 1.0;  // S / (2 S0)
  double weight_r = 1.0;  // S / (2 S1)
};

/// Throws DataError when a class is missing.
ClassWeights class_weights(const std::vector<int>& labels);

}  // namespace simast
