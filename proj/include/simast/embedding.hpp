#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "simast/tensor.hpp"

namespace simast {

using Sequence = std::vector<std::string>;
using Corpus = std::vector<Sequence>;

inline constexpr const char* kUnknownToken = "<unk>";

/// Token <-> index map in first-occurrence order; index 0 is the unknown token.
class Vocabulary {
 public:
  Vocabulary();
  /// Rebuilds from an index-ordered token list whose first entry is kUnknownToken.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  /// Adds the token if new and returns its index.
  std::size_t add(const std::string& token);
  /// 0 for unknown tokens.
  std::size_t index(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws DataError on an empty corpus.
Vocabulary build_vocab(const Corpus& corpus);

/// |V| x dim row-major table; row i embeds vocabulary index i.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, std::size_t dim, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct SkipGramOptions {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  std::uint64_t seed = 1;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
};

/// Skip-gram with negative sampling (unigram^0.75 noise, shrinking random
/// window, linearly decaying step). Single-threaded and deterministic for a
/// given seed. `epoch_loss`, when given, receives the mean per-pair loss of
/// each epoch. Throws ConfigError for a zero dim or window.
EmbeddingTable train_skipgram(const Corpus& corpus, const Vocabulary& vocab,
                              const SkipGramOptions& options,
                              std::vector<double>* epoch_loss = nullptr);

/// Embedding matrix x for a label sequence, shape {n, dim}. Unknown labels
/// map to row 0.
ad::Tensor lookup(const Sequence& labels, const Vocabulary& vocab, const EmbeddingTable& table);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Embeddings {
  Vocabulary vocab;
  EmbeddingTable table;
};

// File layout (little-endian): "SIMASTEM" | u64 |V| | u64 dim |
// f64 rows (row-major) | |V| x (u32 length, UTF-8 bytes).
void save_embeddings(const std::filesystem::path& path, const Embeddings& embeddings);
Embeddings load_embeddings(const std::filesystem::path& path);

}  // namespace simast
