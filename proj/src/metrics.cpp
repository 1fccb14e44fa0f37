#include "simast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "simast/error.hpp"

namespace simast {

void ConfusionCounts::add(int label, int predicted) {
  if (label == 1) (predicted == 1 ? tp : fn) += 1;
  else (predicted == 1 ? fp : tn) += 1;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("accuracy of an empty prediction set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double precision(const ConfusionCounts& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ConfusionCounts& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

bool f1_degenerate(const ConfusionCounts& c) { return c.tp == 0; }

double f1(const ConfusionCounts& c) {
  if (f1_degenerate(c)) return 0.0;
  const double p = precision(c), r = recall(c);
  return 2.0 * p * r / (p + r);
}

bool mcc_degenerate(const ConfusionCounts& c) {
  return c.tp + c.fp == 0 || c.tp + c.fn == 0 || c.tn + c.fp == 0 || c.tn + c.fn == 0;
}

double mcc(const ConfusionCounts& c) {
  if (mcc_degenerate(c)) return 0.0;
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  return std::clamp((tp * tn - fp * fn) / denom, -1.0, 1.0);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are doubled so that tied average ranks stay integral.
  double pos = 0, neg = 0, pos_rank2 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank2 = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        pos += 1;
        pos_rank2 += avg_rank2;
      } else {
        neg += 1;
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0) throw DataError("auc needs at least one positive and one negative");
  const double u2 = pos_rank2 - pos * (pos + 1);
  return u2 / (2.0 * pos * neg);
}

}  // namespace simast
