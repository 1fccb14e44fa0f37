#include "simast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "simast/error.hpp"
#include "simast/interchange.hpp"

namespace simast {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

Fragment fragment_from_json(const json& value, bool ast_format, const char* field, std::size_t line) {
  if (ast_format) {
    if (!value.is_object()) throw DataError(at_line(line) + "'" + field + "' must be an AST object");
    try {
      return ast_from_json(value);
    } catch (const SchemaError& e) {
      throw DataError(at_line(line) + field + ": " + e.what());
    }
  }
  if (!value.is_string()) throw DataError(at_line(line) + "'" + field + "' must be a string");
  try {
    return SourceFragment(value.get<std::string>());
  } catch (const DataError& e) {
    throw DataError(at_line(line) + field + ": " + e.what());
  }
}

}  // namespace

std::vector<ReviewRecord> read_jsonl(std::istream& in) {
  std::vector<ReviewRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DataError(at_line(line) + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(at_line(line) + "expected a JSON object");
    for (const char* key : {"id", "original", "revised", "label"}) {
      if (!obj.contains(key)) throw DataError(at_line(line) + "missing field '" + key + "'");
    }
    std::string id;
    if (obj["id"].is_string()) id = obj["id"].get<std::string>();
    else if (obj["id"].is_number_integer()) id = std::to_string(obj["id"].get<long long>());
    else throw DataError(at_line(line) + "'id' must be a string or integer");

    const json& label = obj["label"];
    if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1)) {
      throw DataError(at_line(line) + "label must be 0 or 1, got " + label.dump());
    }
    bool ast_format = false;
    if (auto f = obj.find("format"); f != obj.end()) {
      if (*f == "ast") ast_format = true;
      else if (*f != "source") throw DataError(at_line(line) + "format must be 'source' or 'ast'");
    }
    out.push_back(ReviewRecord{id, fragment_from_json(obj["original"], ast_format, "original", line),
                               fragment_from_json(obj["revised"], ast_format, "revised", line),
                               static_cast<int>(label.get<long long>())});
  }
  return out;
}

std::vector<ReviewRecord> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_jsonl(in);
}

void write_jsonl(std::ostream& out, const std::vector<ReviewRecord>& records) {
  for (const auto& r : records) {
    const bool ast_format = std::holds_alternative<Ast>(r.original);
    if (ast_format != std::holds_alternative<Ast>(r.revised)) {
      throw DataError("record '" + r.id + "' mixes source and AST fragments");
    }
    auto encode = [&](const Fragment& f) -> json {
      if (ast_format) return ast_to_json(std::get<Ast>(f));
      return std::get<SourceFragment>(f).text();
    };
    json obj = {{"id", r.id},
                {"original", encode(r.original)},
                {"revised", encode(r.revised)},
                {"label", r.label},
                {"format", ast_format ? "ast" : "source"}};
    out << obj.dump() << '\n';
  }
}

Ast to_ast(const Fragment& fragment) {
  if (const auto* src = std::get_if<SourceFragment>(&fragment)) return parse_subset(*src);
  return std::get<Ast>(fragment);
}

PreprocessedFragment preprocess_fragment(const Fragment& fragment, const PreprocessOptions& options) {
  const Ast tree = to_ast(fragment);
  PreprocessedFragment out;
  out.source_nodes = count_nodes(tree);
  out.source_code_tokens = code_token_count(tree);
  out.sequence = serialize(options.simplify ? simplify(tree, options.keep_rule) : tree);
  return out;
}

PreprocessedPair preprocess_record(const ReviewRecord& record, const PreprocessOptions& options) {
  try {
    return {record.id, preprocess_fragment(record.original, options),
            preprocess_fragment(record.revised, options), record.label};
  } catch (const ParseError& e) {
    throw DataError("record '" + record.id + "': " + e.what());
  }
}

std::vector<PreprocessedPair> preprocess_all(const std::vector<ReviewRecord>& records,
                                             const PreprocessOptions& options, std::size_t threads) {
  std::vector<PreprocessedPair> out(records.size());
  detail::parallel_for(records.size(), threads,
                       [&](std::size_t i) { out[i] = preprocess_record(records[i], options); });
  return out;
}

namespace {

json fragment_to_json(const std::string& id, const char* role, int label,
                      const PreprocessedFragment& f) {
  json parents = json::array();
  for (std::size_t p : f.sequence.parents) {
    if (p == kNoParent) parents.push_back(-1);
    else parents.push_back(p);
  }
  std::string kinds;
  for (NodeKind k : f.sequence.kinds) kinds.push_back(k == NodeKind::Code ? 'c' : 'a');
  return json{{"id", id},
              {"role", role},
              {"label", label},
              {"labels", f.sequence.labels},
              {"parents", std::move(parents)},
              {"kinds", std::move(kinds)},
              {"source_nodes", f.source_nodes},
              {"source_code_tokens", f.source_code_tokens}};
}

PreprocessedFragment fragment_from_line(const json& obj, std::size_t line) {
  PreprocessedFragment f;
  try {
    f.sequence.labels = obj.at("labels").get<std::vector<std::string>>();
    for (const json& p : obj.at("parents")) {
      const long long v = p.get<long long>();
      f.sequence.parents.push_back(v < 0 ? kNoParent : static_cast<std::size_t>(v));
    }
    const std::string kinds = obj.value("kinds", std::string(f.sequence.labels.size(), 'a'));
    for (char k : kinds) {
      if (k != 'a' && k != 'c') throw DataError(at_line(line) + "kinds must use 'a'/'c'");
      f.sequence.kinds.push_back(k == 'c' ? NodeKind::Code : NodeKind::Attribute);
    }
    f.source_nodes = obj.value("source_nodes", f.sequence.labels.size());
    f.source_code_tokens = obj.value("source_code_tokens", std::size_t{0});
  } catch (const json::exception& e) {
    throw DataError(at_line(line) + "bad fragment record (" + e.what() + ")");
  }
  const std::size_t n = f.sequence.labels.size();
  if (n == 0) throw DataError(at_line(line) + "fragment has no nodes");
  if (f.sequence.parents.size() != n || f.sequence.kinds.size() != n) {
    throw DataError(at_line(line) + "labels, parents and kinds must have equal length");
  }
  return f;
}

}  // namespace

void write_pairs(std::ostream& out, const std::vector<PreprocessedPair>& pairs) {
  for (const auto& p : pairs) {
    out << fragment_to_json(p.id, "original", p.label, p.original).dump() << '\n';
    out << fragment_to_json(p.id, "revised", p.label, p.revised).dump() << '\n';
  }
}

void save_pairs(const std::filesystem::path& path, const std::vector<PreprocessedPair>& pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_pairs(out, pairs);
}

std::vector<PreprocessedPair> read_pairs(std::istream& in) {
  std::vector<PreprocessedPair> out;
  std::string text;
  std::size_t line = 0;
  std::optional<PreprocessedPair> pending;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DataError(at_line(line) + "malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(at_line(line) + "expected a JSON object");
    const std::string role = obj.value("role", std::string());
    const std::string id = obj.value("id", std::string());
    const int label = obj.value("label", -1);
    if (label != 0 && label != 1) throw DataError(at_line(line) + "label must be 0 or 1");
    PreprocessedFragment fragment = fragment_from_line(obj, line);
    if (role == "original") {
      if (pending) throw DataError(at_line(line) + "original fragment without its revised partner");
      pending = PreprocessedPair{id, std::move(fragment), {}, label};
    } else if (role == "revised") {
      if (!pending || pending->id != id || pending->label != label) {
        throw DataError(at_line(line) + "revised fragment does not follow its original");
      }
      pending->revised = std::move(fragment);
      out.push_back(std::move(*pending));
      pending.reset();
    } else {
      throw DataError(at_line(line) + "role must be 'original' or 'revised'");
    }
  }
  if (pending) throw DataError("pair '" + pending->id + "' has no revised fragment");
  return out;
}

std::vector<PreprocessedPair> load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_pairs(in);
}

std::vector<PreparedPair> prepare(const std::vector<PreprocessedPair>& pairs,
                                  Normalization normalization) {
  std::vector<PreparedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({p.id, build_graph(p.original.sequence, normalization),
                   build_graph(p.revised.sequence, normalization), p.label});
  }
  return out;
}

SplitIndices stratified_split(const std::vector<std::string>& ids, const std::vector<int>& labels,
                              double train_fraction, std::uint64_t seed) {
  if (ids.size() != labels.size()) throw DataError("ids and labels differ in length");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie in (0, 1)");
  }
  std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) throw DataError("record ids must be unique for a keyed split");

  std::map<int, std::vector<std::string>> by_class;
  for (std::size_t i = 0; i < ids.size(); ++i) by_class[labels[i]].push_back(ids[i]);

  std::set<std::string> train_ids;
  for (auto& [label, members] : by_class) {
    std::sort(members.begin(), members.end());
    std::mt19937_64 rng(seed * 1000003u + static_cast<std::uint64_t>(label));
    rnd::shuffle(members, rng);
    const auto take = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    train_ids.insert(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }

  SplitIndices out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (train_ids.count(ids[i]) ? out.train : out.test).push_back(i);
  }
  if (out.train.empty() || out.test.empty()) {
    throw DataError("split leaves the " + std::string(out.train.empty() ? "train" : "test") +
                    " side empty");
  }
  return out;
}

ClassWeights class_weights(const std::vector<int>& labels) {
  const auto rejected = static_cast<double>(std::count(labels.begin(), labels.end(), 0));
  const auto accepted = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (rejected == 0 || accepted == 0) throw DataError("class weights need both labels present");
  const double total = rejected + accepted;
  return {total / (2.0 * rejected), total / (2.0 * accepted)};
}

}  // namespace simast
