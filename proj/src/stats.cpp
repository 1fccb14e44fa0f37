#include "simast/stats.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "simast/error.hpp"

namespace simast {

EffectLevel effect_level(double delta) {
  const double a = std::fabs(delta);
  if (a < 0.147) return EffectLevel::Negligible;
  if (a < 0.33) return EffectLevel::Small;
  if (a < 0.474) return EffectLevel::Medium;
  return EffectLevel::Large;
}

std::string_view effect_level_name(EffectLevel level) {
  switch (level) {
    case EffectLevel::Negligible: return "Negligible";
    case EffectLevel::Small: return "Small";
    case EffectLevel::Medium: return "Medium";
    case EffectLevel::Large: return "Large";
  }
  return "Negligible";
}

CliffsDelta cliffs_delta(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw DataError("cliff's delta needs two non-empty samples");
  long long greater = 0, less = 0;
  for (double x : xs) {
    for (double y : ys) {
      greater += x > y;
      less += x < y;
    }
  }
  const double delta = static_cast<double>(greater - less) /
                       (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
  return {delta, effect_level(delta)};
}

namespace {

double upper_normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Exact two-sided p from the distribution of 2*W+ over all sign patterns.
double exact_p(const std::vector<long long>& ranks2, long long w2) {
  const long long total = std::accumulate(ranks2.begin(), ranks2.end(), 0LL);
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  long long reach = 0;
  for (long long r : ranks2) {
    reach += r;
    for (long long s = reach; s >= r; --s) count[static_cast<std::size_t>(s)] += count[static_cast<std::size_t>(s - r)];
  }
  const double patterns = std::ldexp(1.0, static_cast<int>(ranks2.size()));
  double lower = 0.0, upper = 0.0;
  for (long long s = 0; s <= total; ++s) {
    if (s <= w2) lower += count[static_cast<std::size_t>(s)];
    if (s >= w2) upper += count[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / patterns);
}

double approximate_p(const std::vector<double>& ranks, double w_plus, bool edgeworth) {
  double sum_sq = 0.0, sum_4 = 0.0, sum = 0.0;
  for (double r : ranks) {
    sum += r;
    sum_sq += r * r;
    sum_4 += r * r * r * r;
  }
  const double mean = sum / 2.0;
  const double var = sum_sq / 4.0;  // equals n(n+1)(2n+1)/24 - sum(t^3 - t)/48
  const double z = std::max(0.0, std::fabs(w_plus - mean) - 0.5) / std::sqrt(var);
  double tail = upper_normal_tail(z);
  if (edgeworth) {
    const double kurtosis = (-sum_4 / 8.0) / (var * var);
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    tail += density * kurtosis / 24.0 * (z * z * z - 3.0 * z);
  }
  return std::clamp(2.0 * tail, DBL_MIN, 1.0);
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys,
                                    WilcoxonMethod method) {
  if (xs.size() != ys.size()) throw DataError("wilcoxon needs paired samples of equal length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const std::size_t n = diffs.size();
  if (n == 0) throw DataError("wilcoxon needs at least one nonzero difference");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<long long> ranks2(n);  // doubled average ranks
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::fabs(diffs[order[j]]) == std::fabs(diffs[order[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) ranks2[order[k]] = static_cast<long long>(i + 1 + j);
    i = j;
  }
  long long w2 = 0;
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    ranks[i] = static_cast<double>(ranks2[i]) / 2.0;
    if (diffs[i] > 0) w2 += ranks2[i];
  }

  WilcoxonResult result;
  result.n = n;
  result.w_plus = static_cast<double>(w2) / 2.0;
  if (method == WilcoxonMethod::Auto) {
    method = n <= kExactWilcoxonLimit ? WilcoxonMethod::Exact : WilcoxonMethod::Edgeworth;
  }
  if (method == WilcoxonMethod::Exact) {
    if (n > 40) throw DataError("exact wilcoxon is limited to 40 pairs");
    result.exact = true;
    result.p = std::max(exact_p(ranks2, w2), DBL_MIN);
  } else {
    result.p = approximate_p(ranks, result.w_plus, method == WilcoxonMethod::Edgeworth);
  }
  return result;
}

std::string_view outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Win: return "Win";
    case Outcome::Tie: return "Tie";
    case Outcome::Loss: return "Loss";
  }
  return "Tie";
}

Verdict win_tie_loss(std::span<const double> ours, std::span<const double> theirs) {
  Verdict v;
  try {
    v.p = wilcoxon_signed_rank(ours, theirs).p;
  } catch (const DataError&) {
    if (ours.size() != theirs.size()) throw;
    v.p = 1.0;
  }
  const CliffsDelta cd = cliffs_delta(ours, theirs);
  v.delta = cd.delta;
  v.level = cd.level;
  if (v.p < 0.05 && v.level != EffectLevel::Negligible) {
    if (v.delta > 0) v.outcome = Outcome::Win;
    else if (v.delta < 0) v.outcome = Outcome::Loss;
  }
  return v;
}

std::string format_p_delta(const Verdict& verdict) {
  std::string p;
  if (verdict.p < 0.05) {
    p = "<0.05";
  } else {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << verdict.p;
    p = os.str();
    p.erase(p.find_last_not_of('0') + 1);
    if (p.back() == '.') p.pop_back();
  }
  return p + "(" + (verdict.delta < 0 ? "-" : "+") + std::string(effect_level_name(verdict.level)) + ")";
}

}  // namespace simast
