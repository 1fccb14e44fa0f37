#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace simast {

// Significance machinery for comparing two models over repeated runs:
// Wilcoxon signed-rank p values, Cliff's delta effect sizes and the
// Win/Tie/Loss verdict that combines them.

enum class EffectLevel { Negligible, Small, Medium, Large };

/// |delta| < 0.147 Negligible, < 0.33 Small, < 0.474 Medium, else Large.
EffectLevel effect_level(double delta);
std::string_view effect_level_name(EffectLevel level);

struct CliffsDelta {
  double delta = 0.0;  // in [-1, 1]
  EffectLevel level = EffectLevel::Negligible;
};

/// delta = (#{x > y} - #{x < y}) / (|xs| |ys|) over all cross pairs.
/// Throws DataError when either sample is empty.
CliffsDelta cliffs_delta(std::span<const double> xs, std::span<const double> ys);

enum class WilcoxonMethod {
  Auto,       // Exact for n <= 12 nonzero differences, Edgeworth above
  Exact,      // full null distribution of W+ (given the observed ranks)
  Normal,     // normal approximation, tie + continuity corrected
  Edgeworth,  // Normal plus the kurtosis term of the Edgeworth expansion
};

inline constexpr std::size_t kExactWilcoxonLimit = 12;

struct WilcoxonResult {
  double p = 1.0;         // two-sided, in (0, 1]
  double w_plus = 0.0;    // sum of ranks of positive differences
  std::size_t n = 0;      // nonzero differences used
  bool exact = false;
};

/// Two-sided signed-rank test on paired samples. Zero differences are
/// dropped and tied magnitudes get average ranks. Throws DataError for
/// unequal lengths or when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

enum class Outcome { Win, Tie, Loss };
std::string_view outcome_name(Outcome outcome);

struct Verdict {
  Outcome outcome = Outcome::Tie;
  double p = 1.0;
  double delta = 0.0;
  EffectLevel level = EffectLevel::Negligible;
};

/// Win when p < 0.05 with a non-negligible positive delta(ours, theirs),
/// Loss for the negative mirror, Tie otherwise. A degenerate Wilcoxon test
/// (all differences zero) counts as p = 1.
Verdict win_tie_loss(std::span<const double> ours, std::span<const double> theirs);

/// Cell text such as "<0.05(+Large)" or "0.6(-Small)".
std::string format_p_delta(const Verdict& verdict);

}  // namespace simast
