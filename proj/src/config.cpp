#include "simast/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "simast/error.hpp"

namespace simast {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoGcn: return "nogcn";
    case Variant::ConcatCompare: return "concat";
  }
  return "full";
}

void ModelConfig::validate() const {
  if (embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
  if (hidden_dim == 0) throw ConfigError("hidden_dim must be positive");
  if (!(leaky_slope >= 0)) throw ConfigError("leaky_slope must be >= 0");
  if (!(weight_o > 0) || !(weight_r > 0)) throw ConfigError("class weights must be positive");
  if (!(l2 >= 0)) throw ConfigError("l2 must be >= 0");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (!(init_range >= 0)) throw ConfigError("init_range must be >= 0");
  if (!(bias_init_range >= 0)) throw ConfigError("bias_init_range must be >= 0");
}

ModelConfig parse_config(std::string_view text) {
  ModelConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (key == "embedding_dim") {
      c.embedding_dim = parse_size(key, value);
    } else if (key == "hidden_dim") {
      c.hidden_dim = parse_size(key, value);
    } else if (key == "gcn_layers") {
      c.gcn_layers = parse_size(key, value);
    } else if (key == "leaky_slope") {
      c.leaky_slope = parse_double(key, value);
    } else if (key == "variant") {
      if (value == "full") c.variant = Variant::Full;
      else if (value == "nogcn") c.variant = Variant::NoGcn;
      else if (value == "concat") c.variant = Variant::ConcatCompare;
      else throw ConfigError("variant must be full, nogcn or concat");
    } else if (key == "class_weights") {
      if (value == "balanced") c.class_weights = ClassWeighting::Balanced;
      else if (value == "by_label") c.class_weights = ClassWeighting::ByLabel;
      else if (value == "fixed") c.class_weights = ClassWeighting::Fixed;
      else throw ConfigError("class_weights must be balanced, by_label or fixed");
    } else if (key == "weight_o") {
      c.weight_o = parse_double(key, value);
    } else if (key == "weight_r") {
      c.weight_r = parse_double(key, value);
    } else if (key == "l2") {
      c.l2 = parse_double(key, value);
    } else if (key == "learning_rate") {
      c.learning_rate = parse_double(key, value);
    } else if (key == "normalization") {
      if (value == "row") c.normalization = Normalization::Row;
      else if (value == "symmetric") c.normalization = Normalization::Symmetric;
      else throw ConfigError("normalization must be row or symmetric");
    } else if (key == "init_range") {
      c.init_range = parse_double(key, value);
    } else if (key == "bias_init_range") {
      c.bias_init_range = parse_double(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ModelConfig& c) {
  std::ostringstream os;
  os << "embedding_dim = " << c.embedding_dim << "\n"
     << "hidden_dim = " << c.hidden_dim << "\n"
     << "gcn_layers = " << c.gcn_layers << "\n"
     << "leaky_slope = " << format_double(c.leaky_slope) << "\n"
     << "variant = " << variant_name(c.variant) << "\n"
     << "class_weights = "
     << (c.class_weights == ClassWeighting::Balanced  ? "balanced"
         : c.class_weights == ClassWeighting::ByLabel ? "by_label"
                                                      : "fixed")
     << "\n"
     << "weight_o = " << format_double(c.weight_o) << "\n"
     << "weight_r = " << format_double(c.weight_r) << "\n"
     << "l2 = " << format_double(c.l2) << "\n"
     << "learning_rate = " << format_double(c.learning_rate) << "\n"
     << "normalization = " << (c.normalization == Normalization::Row ? "row" : "symmetric") << "\n"
     << "init_range = " << format_double(c.init_range) << "\n"
     << "bias_init_range = " << format_double(c.bias_init_range) << "\n";
  return os.str();
}

}  // namespace simast
