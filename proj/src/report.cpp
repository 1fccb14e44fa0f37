#include "simast/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "simast/dataset.hpp"
#include "simast/error.hpp"

namespace simast {

TreeSizes tree_sizes(const Ast& original, const Ast& simplified) {
  const std::size_t code = code_token_count(original);
  if (code_token_count(simplified) != code) throw DataError("simplification changed the code tokens");
  return {count_nodes(original), count_nodes(simplified), code};
}

std::vector<TreeSizes> tree_sizes(std::span<const PreprocessedPair> pairs) {
  std::vector<TreeSizes> out;
  out.reserve(pairs.size() * 2);
  auto add = [&](const std::string& id, const PreprocessedFragment& f) {
    const auto code = static_cast<std::size_t>(
        std::count(f.sequence.kinds.begin(), f.sequence.kinds.end(), NodeKind::Code));
    if (code != f.source_code_tokens) throw DataError("pair " + id + ": code token count changed");
    out.push_back({f.source_nodes, f.sequence.labels.size(), code});
  };
  for (const auto& p : pairs) {
    add(p.id, p.original);
    add(p.id, p.revised);
  }
  return out;
}

double simplified_rate(double original_average, double simplified_average) {
  return 1.0 - simplified_average / original_average;
}

double code_token_rate(double average_code_tokens, double average_tokens) {
  return average_code_tokens / average_tokens;
}

double percentage_increase(double original_rate, double simplified_rate) {
  return (simplified_rate - original_rate) * 100.0;
}

TreeStats tree_stats(std::span<const TreeSizes> corpus) {
  if (corpus.empty()) throw DataError("tree statistics need a non-empty corpus");
  unsigned long long original = 0, simplified = 0, code = 0;
  TreeStats s;
  s.fragments = corpus.size();
  for (const auto& t : corpus) {
    if (t.original_nodes == 0 || t.simplified_nodes == 0) throw DataError("empty tree in corpus");
    if (t.simplified_nodes > t.original_nodes) throw DataError("simplified tree larger than original");
    original += t.original_nodes;
    simplified += t.simplified_nodes;
    code += t.code_tokens;
    s.original.max_tokens = std::max(s.original.max_tokens, t.original_nodes);
    s.simplified.max_tokens = std::max(s.simplified.max_tokens, t.simplified_nodes);
  }
  // Ratios of integer sums: the fragment count cancels, so each rate is
  // one rounding away from the exact rational value.
  using ld = long double;
  const ld n = static_cast<ld>(corpus.size());
  s.original.average_tokens = static_cast<double>(static_cast<ld>(original) / n);
  s.simplified.average_tokens = static_cast<double>(static_cast<ld>(simplified) / n);
  s.original.average_code_tokens = s.simplified.average_code_tokens =
      static_cast<double>(static_cast<ld>(code) / n);
  s.original.code_token_rate = static_cast<double>(static_cast<ld>(code) / static_cast<ld>(original));
  s.simplified.code_token_rate = static_cast<double>(static_cast<ld>(code) / static_cast<ld>(simplified));
  s.simplified_rate = static_cast<double>(static_cast<ld>(original - simplified) / static_cast<ld>(original));
  s.percentage_increase = static_cast<double>(
      100.0L * static_cast<ld>(code) * static_cast<ld>(original - simplified) /
      (static_cast<ld>(original) * static_cast<ld>(simplified)));
  return s;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string percent(double fraction) { return fixed2(fraction * 100.0) + "%"; }

}  // namespace

void write_tree_stats_csv(std::ostream& out, const std::string& corpus_name, const TreeStats& s) {
  out << "corpus,operation,max_token,average_token,simplified_rate,average_code_token,"
         "code_token_rate,percentage_increase\n";
  out << corpus_name << ",Original," << s.original.max_tokens << ',' << fixed2(s.original.average_tokens)
      << ',' << percent(s.simplified_rate) << ',' << fixed2(s.original.average_code_tokens) << ','
      << percent(s.original.code_token_rate) << ',' << fixed2(s.percentage_increase) << '\n';
  out << corpus_name << ",Simplified," << s.simplified.max_tokens << ','
      << fixed2(s.simplified.average_tokens) << ",," << fixed2(s.simplified.average_code_tokens) << ','
      << percent(s.simplified.code_token_rate) << ",\n";
}

}  // namespace simast
