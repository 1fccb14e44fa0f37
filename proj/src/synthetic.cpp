#include "simast/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "random.hpp"
#include "simast/error.hpp"

namespace simast {

namespace {

constexpr std::array kMethodNames = {"process", "compute", "update", "resolve", "handle",
                                     "merge",   "check",   "apply",  "scan",    "collect"};
constexpr std::array kLocals = {"count", "total", "index", "value", "limit",
                                "offset", "result", "width", "depth", "step"};
constexpr std::array kIntParams = {"n", "size", "start", "bound", "level", "rate"};
constexpr std::array kRefParams = {"key", "name", "items", "node", "buffer", "source"};
constexpr std::array kRefTypes = {"String", "List", "Map", "Node", "Buffer"};
constexpr std::array kHelpers = {"log", "notify", "validate", "flush", "record", "emit"};
constexpr std::array kArith = {"+", "-", "*"};
constexpr std::array kCompare = {"<", ">", "<=", ">="};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(rnd::uniform01(rng_) * static_cast<double>(n));
  }
  bool chance(double p) { return rnd::uniform01(rng_) < p; }
  template <typename A>
  std::string pick(const A& options) {
    return options[below(options.size())];
  }
  std::string pick(const std::vector<std::string>& options) { return options[below(options.size())]; }
  std::string number() { return std::to_string(below(100)); }

 private:
  std::mt19937_64 rng_;
};

struct Method {
  std::string return_type;
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // type, name
  std::vector<std::string> int_names;                      // int params and locals
  std::vector<std::string> ref_names;
  std::vector<std::string> locals;
  std::vector<std::string> body;
  std::string final_return;  // empty for void

  std::string render() const {
    std::string out = "public " + return_type + " " + name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ", ";
      out += params[i].first + " " + params[i].second;
    }
    out += ") {\n";
    for (const auto& s : body) out += "  " + s + "\n";
    if (!final_return.empty()) out += "  " + final_return + "\n";
    out += "}\n";
    return out;
  }
};

std::string atom(Gen& g, const Method& m) {
  if (m.int_names.empty() || g.chance(0.3)) return g.number();
  return g.pick(m.int_names);
}

std::string expr(Gen& g, const Method& m) {
  switch (g.below(4)) {
    case 0: return atom(g, m);
    case 1:
      if (!m.ref_names.empty()) return g.pick(m.ref_names) + ".size()";
      [[fallthrough]];
    case 2: return atom(g, m) + " " + g.pick(kArith) + " " + atom(g, m);
    default: return g.pick(kMethodNames) + "(" + atom(g, m) + ", " + atom(g, m) + ")";
  }
}

std::string statement(Gen& g, Method& m) {
  const bool can_assign = !m.locals.empty();
  switch (g.below(7)) {
    case 0:
      if (m.locals.size() < kLocals.size()) {
        std::string v;
        do v = g.pick(kLocals);
        while (std::find(m.int_names.begin(), m.int_names.end(), v) != m.int_names.end());
        std::string s = "int " + v + " = " + expr(g, m) + ";";
        m.locals.push_back(v);
        m.int_names.push_back(v);
        return s;
      }
      [[fallthrough]];
    case 1:
      if (can_assign) return g.pick(m.locals) + " = " + expr(g, m) + ";";
      [[fallthrough]];
    case 2: return g.pick(kHelpers) + "(" + atom(g, m) + ");";
    case 3:
      if (can_assign) return g.pick(m.locals) + " += " + atom(g, m) + ";";
      [[fallthrough]];
    case 4:
      if (can_assign) {
        return "if (" + atom(g, m) + " " + g.pick(kCompare) + " " + atom(g, m) + ") { " + g.pick(m.locals) +
               " = " + expr(g, m) + "; }";
      }
      [[fallthrough]];
    case 5:
      if (can_assign) {
        const std::string v = g.pick(m.locals);
        return "while (" + v + " < " + atom(g, m) + ") { " + v + "++; }";
      }
      [[fallthrough]];
    default:
      if (can_assign) {
        return "for (int i = 0; i < " + atom(g, m) + "; i++) { " + g.pick(m.locals) + " += i; }";
      }
      return g.pick(kHelpers) + "(" + g.number() + ");";
  }
}

Method random_method(Gen& g) {
  Method m;
  constexpr std::array kReturnTypes = {"int", "boolean", "void"};
  m.return_type = g.pick(kReturnTypes);
  m.name = g.pick(kMethodNames);
  const std::size_t nparams = 1 + g.below(3);
  for (std::size_t i = 0; i < nparams; ++i) {
    if (g.chance(0.5)) {
      std::string p = g.pick(kRefParams);
      if (std::find(m.ref_names.begin(), m.ref_names.end(), p) != m.ref_names.end()) continue;
      m.params.emplace_back(g.pick(kRefTypes), p);
      m.ref_names.push_back(p);
    } else {
      std::string p = g.pick(kIntParams);
      if (std::find(m.int_names.begin(), m.int_names.end(), p) != m.int_names.end()) continue;
      m.params.emplace_back("int", p);
      m.int_names.push_back(p);
    }
  }
  const std::size_t nstmts = 2 + g.below(5);
  for (std::size_t i = 0; i < nstmts; ++i) m.body.push_back(statement(g, m));
  if (m.return_type == "int") m.final_return = "return " + expr(g, m) + ";";
  else if (m.return_type == "boolean") m.final_return = "return " + atom(g, m) + " > " + atom(g, m) + ";";
  return m;
}

std::string guard(Gen& g, const Method& m) {
  std::string cond;
  if (!m.ref_names.empty()) cond = g.pick(m.ref_names) + " == null";
  else if (!m.int_names.empty()) cond = g.pick(m.int_names) + " " + g.pick(kCompare) + " " + g.number();
  else cond = "limit() == 0";
  std::string value;
  if (m.return_type == "int") value = " " + g.number();
  else if (m.return_type == "boolean") value = g.chance(0.5) ? " true" : " false";
  return "if (" + cond + ") { return" + value + "; }";
}

std::string replace_word(const std::string& text, const std::string& from, const std::string& to) {
  std::string out;
  auto word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, from.size(), from) == 0 && (i == 0 || !word_char(text[i - 1])) &&
        (i + from.size() == text.size() || !word_char(text[i + from.size()]))) {
      out += to;
      i += from.size();
    } else {
      out += text[i++];
    }
  }
  return out;
}

// A call, declaration or assignment.
std::string decoy(Gen& g, const Method& m) {
  switch (g.below(3)) {
    case 0: return g.pick(kHelpers) + "(" + atom(g, m) + ");";
    case 1: return "int " + std::string(g.pick(kLocals)) + "0 = " + expr(g, m) + ";";
    default:
      if (!m.locals.empty()) return g.pick(m.locals) + " = " + g.number() + ";";
      return g.pick(kHelpers) + "(" + g.number() + ");";
  }
}

// Any edit except a returning guard.
Method neutral_edit(Gen& g, Method m) {
  if (g.chance(0.7)) {
    m.body.insert(m.body.begin() + static_cast<std::ptrdiff_t>(g.below(m.body.size() + 1)), decoy(g, m));
    return m;
  }
  switch (g.below(3)) {
    case 0:
      if (!m.locals.empty()) {
        const std::string from = g.pick(m.locals);
        const std::string to = from + "2";
        for (auto& s : m.body) s = replace_word(s, from, to);
        m.final_return = replace_word(m.final_return, from, to);
        return m;
      }
      [[fallthrough]];
    case 1:
      for (auto& s : m.body) {
        const auto pos = s.find_first_of("0123456789");
        if (pos != std::string::npos) {
          std::size_t end = pos;
          while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
          s.replace(pos, end - pos, std::to_string(std::stoi(s.substr(pos, end - pos)) + 1));
          return m;
        }
      }
      [[fallthrough]];
    default:
      m.body.push_back(g.pick(kHelpers) + "(" + atom(g, m) + ");");
      return m;
  }
}

}  // namespace

std::vector<ReviewRecord> generate_synthetic(const SyntheticOptions& options) {
  if (options.accept_fraction < 0.0 || options.accept_fraction > 1.0) {
    throw ConfigError("accept fraction must lie in [0, 1]");
  }
  Gen g(options.seed);
  const auto accepts = static_cast<std::size_t>(
      std::llround(static_cast<double>(options.pairs) * options.accept_fraction));
  std::vector<int> labels(options.pairs, 0);
  std::fill_n(labels.begin(), std::min(accepts, labels.size()), 1);
  std::mt19937_64 order_rng(options.seed ^ 0x5eedULL);
  rnd::shuffle(labels, order_rng);

  std::vector<ReviewRecord> out;
  out.reserve(options.pairs);
  for (std::size_t i = 0; i < options.pairs; ++i) {
    const Method original = random_method(g);
    Method revised = original;
    if (labels[i] == 1) revised.body.insert(revised.body.begin(), guard(g, original));
    else revised = neutral_edit(g, original);
    out.push_back({"syn-" + std::to_string(i), SourceFragment(original.render()),
                   SourceFragment(revised.render()), labels[i]});
  }
  return out;
}

}  // namespace simast
