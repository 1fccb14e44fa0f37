#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "simast/graph.hpp"

namespace simast {

enum class Variant {
  Full,           // Bi-GRU -> GCN -> retrieval attention, subtraction compare
  NoGcn,          // attention over the Bi-GRU states only ("SimAST")
  ConcatCompare,  // classifier sees [r_original ; r_revised] ("SAGCN-C")
};

/// How the two loss-term weights are chosen for a training split.
enum class ClassWeighting {
  Balanced,  // weight_o = S / (2 S0), weight_r = S / (2 S1)
  ByLabel,   // each label's term weighted by its own inverse frequency
  Fixed,     // weight_o / weight_r as configured
};

struct ModelConfig {
  std::size_t embedding_dim = 300;
  std::size_t hidden_dim = 300;  // per GRU direction
  std::size_t gcn_layers = 3;
  double leaky_slope = 0.01;
  Variant variant = Variant::Full;
  ClassWeighting class_weights = ClassWeighting::Balanced;
  double weight_o = 1.0;  // multiplies the label-1 (accept) term
  double weight_r = 1.0;  // multiplies the label-0 (reject) term
  double l2 = 1e-5;
  double learning_rate = 1e-3;
  Normalization normalization = Normalization::Row;
  double init_range = 0.0;  // weights: U(-a, a); 0 selects Glorot, a = sqrt(6 / (fan_in + fan_out))
  double bias_init_range = 0.01;  // biases: U(-a, a)

  /// Throws ConfigError when a value is out of range.
  void validate() const;
  std::size_t representation_dim() const { return 2 * hidden_dim; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys and malformed values are ConfigErrors.
ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const ModelConfig& config);

std::string_view variant_name(Variant v);

}  // namespace simast
