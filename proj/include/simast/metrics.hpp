#pragma once

#include <cstddef>
#include <span>

namespace simast {

/// Binary confusion counts; the positive class is accept (label 1).
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  void add(int label, int predicted);

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Throws DataError when there are no samples.
double accuracy(const ConfusionCounts& c);
/// 0 when undefined.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
/// Harmonic mean of precision and recall; 0 when both are 0 or undefined.
double f1(const ConfusionCounts& c);
/// (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)); 0 when any factor is 0.
double mcc(const ConfusionCounts& c);
/// True when mcc() or f1() fell back to the zero convention.
bool mcc_degenerate(const ConfusionCounts& c);
bool f1_degenerate(const ConfusionCounts& c);

/// Rank (Mann-Whitney) AUC with average ranks for ties: the fraction of
/// positive/negative pairs ordered correctly, ties counting one half.
/// Throws DataError unless both labels are present.
double auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace simast
