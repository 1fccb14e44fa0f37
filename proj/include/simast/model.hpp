#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "simast/archive.hpp"
#include "simast/config.hpp"
#include "simast/embedding.hpp"
#include "simast/graph.hpp"
#include "simast/tensor.hpp"

namespace simast {

/// One GRU direction. Gate blocks are laid out [update | reset | candidate].
struct GruParams {
  ad::Tensor input_weight;      // {m, 3h}
  ad::Tensor hidden_gates;      // {h, 2h}, update and reset
  ad::Tensor hidden_candidate;  // {h, h}
  ad::Tensor bias;              // {3h}
};

struct GcnLayer {
  ad::Tensor weight;  // {2h, 2h}
  ad::Tensor bias;    // {2h}
};

struct ModelParams {
  GruParams forward;
  GruParams backward;
  std::vector<GcnLayer> gcn;
  ad::Tensor classifier_weight;  // {2, 2h}, or {2, 4h} for ConcatCompare
  ad::Tensor classifier_bias;    // {2}

  /// Uniform initialization, deterministic in `seed`.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);
  /// Restores parameters saved by to_archive; shapes are checked against config.
  static ModelParams from_archive(const Archive& archive, const ModelConfig& config);
  Archive to_archive(const ModelConfig& config) const;

  /// Parameters the variant actually uses (GCN layers are skipped by NoGcn).
  std::vector<ad::Tensor> trainable(const ModelConfig& config) const;
  /// Weight matrices under the L2 penalty (no biases, only used parameters).
  std::vector<ad::Tensor> penalized(const ModelConfig& config) const;
  /// Deep copy with fresh leaves.
  ModelParams clone() const;
};

/// Contextual states H^c, shape {n, 2h}: forward state at t concatenated
/// with the backward state at t, both started from zero.
ad::Tensor bigru_forward(const ad::Tensor& x, const ModelParams& params);

/// Applies h <- LeakyReLU(L h W + b) once per layer. `layers` must equal
/// the number of supplied layers.
ad::Tensor gcn_forward(const ad::Tensor& h, const SparseMatrix& propagation,
                       std::span<const GcnLayer> layers, std::size_t layer_count, double slope);
/// Dense reference path with L as a {n, n} tensor.
ad::Tensor gcn_forward_dense(const ad::Tensor& h, const ad::Tensor& propagation,
                             std::span<const GcnLayer> layers, std::size_t layer_count,
                             double slope);

struct Attention {
  ad::Tensor weights;         // alpha, {n}
  ad::Tensor representation;  // r, {2h}
};

/// Retrieval attention: beta_t = h^c_t . sum_i hhat_i, alpha = softmax(beta),
/// r = sum_t alpha_t h^c_t. Throws ShapeError for n = 0 or mismatched shapes.
Attention attention_pool(const ad::Tensor& context, const ad::Tensor& graph_states);

/// Full fragment encoder for the configured variant.
Attention encode(const FragmentGraph& fragment, const Embeddings& embeddings,
                 const ModelParams& params, const ModelConfig& config);

struct Prediction {
  ad::Tensor logits;         // {2}
  ad::Tensor probabilities;  // {2}: reject, accept
};

Prediction compare_and_predict(const ad::Tensor& original, const ad::Tensor& revised,
                               const ModelParams& params, const ModelConfig& config);

/// -(w_o * y * log p + w_r * (1 - y) * log(1 - p)), p = P(accept) clamped to
/// [1e-12, 1 - 1e-12].
ad::Tensor sample_loss(const ad::Tensor& probabilities, int label, double weight_o,
                       double weight_r);
/// Sum of squared entries of the penalized weights.
ad::Tensor l2_penalty(const ModelParams& params, const ModelConfig& config);
/// Batch loss: summed sample terms plus l2 * penalty.
ad::Tensor weighted_loss(std::span<const ad::Tensor> probabilities, std::span<const int> labels,
                         const ModelConfig& config, const ModelParams& params);

}  // namespace simast
