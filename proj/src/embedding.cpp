#include "simast/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "binary_io.hpp"
#include "simast/error.hpp"
#include "simast/kernels.hpp"

namespace simast {

Vocabulary::Vocabulary() { add(kUnknownToken); }

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.empty() || tokens.front() != kUnknownToken) {
    throw DataError("vocabulary must start with the unknown token");
  }
  Vocabulary v;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) throw DataError("duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? 0 : it->second;
}

Vocabulary build_vocab(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  Vocabulary v;
  for (const auto& seq : corpus)
    for (const auto& tok : seq) v.add(tok);
  return v;
}

EmbeddingTable::EmbeddingTable(std::size_t rows, std::size_t dim, std::vector<double> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (data_.size() != rows_ * dim_) throw ShapeError("embedding data does not match rows x dim");
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericError("embedding table has a non-finite entry");
  }
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

EmbeddingTable train_skipgram(const Corpus& corpus, const Vocabulary& vocab,
                              const SkipGramOptions& options, std::vector<double>* epoch_loss) {
  if (options.dim == 0) throw ConfigError("embedding dim must be positive");
  if (options.window == 0) throw ConfigError("skip-gram window must be positive");
  const std::size_t V = vocab.size();
  const std::size_t dim = options.dim;

  std::vector<std::vector<std::size_t>> ids;
  std::vector<double> counts(V, 0.0);
  std::size_t total_words = 0;
  for (const auto& seq : corpus) {
    auto& row = ids.emplace_back();
    for (const auto& tok : seq) {
      const std::size_t id = vocab.index(tok);
      row.push_back(id);
      counts[id] += 1.0;
    }
    total_words += seq.size();
  }

  // Noise distribution over known tokens, unigram^0.75.
  std::vector<double> cumulative(V, 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < V; ++i) {
    acc += std::pow(counts[i], 0.75);
    cumulative[i] = acc;
  }

  std::mt19937_64 rng(options.seed);
  std::vector<double> input(V * dim, 0.0);
  std::vector<double> output(V * dim, 0.0);
  for (std::size_t i = dim; i < input.size(); ++i) input[i] = (unit(rng) - 0.5) / static_cast<double>(dim);

  auto sample_negative = [&]() -> std::size_t {
    const double u = unit(rng) * acc;
    auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), u);
    return it == cumulative.end() ? V - 1 : static_cast<std::size_t>(it - cumulative.begin());
  };

  const auto& kt = kernels::active();
  std::vector<double> work(dim);
  const double planned = static_cast<double>(std::max<std::size_t>(1, total_words * options.epochs));
  std::size_t processed = 0;

  if (epoch_loss) epoch_loss->clear();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& seq : ids) {
      for (std::size_t pos = 0; pos < seq.size(); ++pos, ++processed) {
        const double lr = std::max(options.min_learning_rate,
                                   options.learning_rate * (1.0 - processed / planned));
        const std::size_t shrink = rng() % options.window;
        const std::size_t reach = options.window - shrink;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(seq.size() - 1, pos + reach);
        const std::size_t center = seq[pos];
        if (center == 0) continue;
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos || seq[c] == 0) continue;
          double* in = input.data() + center * dim;
          std::fill(work.begin(), work.end(), 0.0);
          for (std::size_t d = 0; d <= options.negatives; ++d) {
            std::size_t target;
            double label;
            if (d == 0) {
              target = seq[c];
              label = 1.0;
            } else {
              target = sample_negative();
              if (target == seq[c]) continue;
              label = 0.0;
            }
            double* out = output.data() + target * dim;
            const double score = kt.dot(in, out, dim);
            loss_sum -= label > 0 ? log_sigmoid(score) : log_sigmoid(-score);
            const double g = (label - sigmoid(score)) * lr;
            kt.axpy(g, out, work.data(), dim);
            kt.axpy(g, in, out, dim);
          }
          kt.axpy(1.0, work.data(), in, dim);
          ++pairs;
        }
      }
    }
    if (epoch_loss) epoch_loss->push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  return EmbeddingTable(V, dim, std::move(input));
}

ad::Tensor lookup(const Sequence& labels, const Vocabulary& vocab, const EmbeddingTable& table) {
  const std::size_t dim = table.dim();
  std::vector<double> data;
  data.reserve(labels.size() * dim);
  for (const auto& label : labels) {
    const std::size_t id = vocab.index(label);
    if (id >= table.rows()) throw DataError("vocabulary and embedding table disagree");
    auto row = table.row(id);
    data.insert(data.end(), row.begin(), row.end());
  }
  return ad::Tensor::from({labels.size(), dim}, std::move(data));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(kernels::dot(a, a));
  const double nb = std::sqrt(kernels::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return kernels::dot(a, b) / (na * nb);
}

namespace {
constexpr char kMagic[8] = {'S', 'I', 'M', 'A', 'S', 'T', 'E', 'M'};
}

void save_embeddings(const std::filesystem::path& path, const Embeddings& e) {
  if (e.vocab.size() != e.table.rows()) throw DataError("vocabulary and table sizes differ");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  binio::write_le<std::uint64_t>(out, e.table.rows());
  binio::write_le<std::uint64_t>(out, e.table.dim());
  for (double v : e.table.data()) binio::write_le<double>(out, v);
  for (const auto& tok : e.vocab.tokens()) binio::write_string(out, tok);
  if (!out) throw DataError("failed writing " + path.string());
}

Embeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw DataError(path.string() + " is not an embedding file");
  }
  const auto rows = binio::read_le<std::uint64_t>(in, "vocabulary size");
  const auto dim = binio::read_le<std::uint64_t>(in, "embedding dim");
  if (rows == 0 || dim == 0 || rows * dim > (1ull << 32)) throw DataError("implausible embedding header");
  std::vector<double> data(rows * dim);
  for (auto& v : data) v = binio::read_le<double>(in, "embedding rows");
  std::vector<std::string> tokens;
  tokens.reserve(rows);
  for (std::uint64_t i = 0; i < rows; ++i) tokens.push_back(binio::read_string(in, "token", 1u << 20));
  return {Vocabulary::from_tokens(std::move(tokens)), EmbeddingTable(rows, dim, std::move(data))};
}

}  // namespace simast
