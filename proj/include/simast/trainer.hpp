#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "simast/config.hpp"
#include "simast/dataset.hpp"
#include "simast/embedding.hpp"
#include "simast/metrics.hpp"
#include "simast/model.hpp"

namespace simast {

struct TrainOptions {
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct MetricRow {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auc = 0.0;  // NaN when the evaluated pairs hold a single class
  double mcc = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean training objective per sample
  MetricRow metrics;
};

struct TrainResult {
  ModelConfig config;  // with the loss weights actually used
  ModelParams params;
  std::vector<EpochRecord> history;
};

/// Loss weights for a training split according to config.class_weights.
/// Throws DataError when a weighting mode needs both classes and one is missing.
ModelConfig resolve_class_weights(const ModelConfig& config, const std::vector<int>& labels);

/// Mini-batch Adam on the weighted loss. Each batch accumulates per-sample
/// gradients, adds the L2 term once, then takes one step. History metrics
/// are measured on `eval` (on `train` when `eval` is empty).
/// With threads > 1 the batch is split into contiguous chunks whose
/// gradients are summed in chunk order, so results depend on the thread
/// count but not on scheduling. Throws DataError for an empty train set.
TrainResult train(const ModelConfig& config, const Embeddings& embeddings,
                  const std::vector<PreparedPair>& train_pairs,
                  const std::vector<PreparedPair>& eval_pairs, const TrainOptions& options);

struct Evaluation {
  ConfusionCounts counts;
  std::vector<double> scores;  // P(accept) per pair
  std::vector<int> labels;
};

Evaluation evaluate(const ModelParams& params, const ModelConfig& config, const Embeddings& embeddings,
                    const std::vector<PreparedPair>& pairs, std::size_t threads = 1);
MetricRow metric_row(const Evaluation& evaluation);

struct RepeatOptions {
  std::size_t repetitions = 30;
  std::uint64_t base_seed = 1;
  double train_fraction = 0.8;
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  std::size_t threads = 1;
};

struct RepetitionResult {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  MetricRow metrics;  // on the held-out split
};

/// Repetition k splits, initializes and shuffles with seed base_seed + k.
std::vector<RepetitionResult> run_repetitions(const ModelConfig& config, const Embeddings& embeddings,
                                              const std::vector<PreparedPair>& pairs,
                                              const RepeatOptions& options);

/// epoch,loss,accuracy,f1,auc,mcc
void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);
/// repetition,seed,accuracy,f1,auc,mcc followed by a mean row.
void write_metrics_csv(std::ostream& out, const std::vector<RepetitionResult>& rows);
/// Per-metric samples from a metrics CSV; the mean row is skipped.
std::map<std::string, std::vector<double>> read_metrics_csv(std::istream& in);

}  // namespace simast
