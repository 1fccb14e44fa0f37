#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "simast/error.hpp"
#include "simast/stats.hpp"
#include "support.hpp"

using namespace simast;

namespace {

// Two-sided exact p by enumerating all 2^n sign assignments of the ranks 1..n.
double enumerate_p(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::fabs(diffs[a]) < std::fabs(diffs[b]); });
  std::vector<int> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = int(r + 1);
  int observed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0) observed += rank[i];
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    int w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += int(i + 1);
    le += w <= observed;
    ge += w >= observed;
  }
  return std::min(1.0, 2.0 * double(std::min(le, ge)) / double(1ULL << n));
}

// Distinct nonzero magnitudes with random signs.
std::vector<double> tie_free(std::mt19937_64& rng, std::size_t n, double shift) {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (double(i) + 1.0 + testing::uniform(rng, 0.0, 0.5));
  std::shuffle(d.begin(), d.end(), rng);
  for (double& v : d)
    if (testing::uniform(rng, 0, 1) < 0.5 - shift) v = -v;
  return d;
}

}  // namespace

TEST_CASE("effect level boundaries") {
  CHECK(effect_level(0.0) == EffectLevel::Negligible);
  CHECK(effect_level(0.1469) == EffectLevel::Negligible);
  CHECK(effect_level(0.147) == EffectLevel::Small);
  CHECK(effect_level(-0.147) == EffectLevel::Small);
  CHECK(effect_level(0.3299) == EffectLevel::Small);
  CHECK(effect_level(0.33) == EffectLevel::Medium);
  CHECK(effect_level(0.4739) == EffectLevel::Medium);
  CHECK(effect_level(0.474) == EffectLevel::Large);
  CHECK(effect_level(-1.0) == EffectLevel::Large);
  CHECK(effect_level_name(EffectLevel::Medium) == "Medium");
}

TEST_CASE("cliffs delta examples and brute force") {
  const std::vector<double> a = {1, 2, 3}, b = {2, 2, 2};
  CHECK(cliffs_delta(a, b).delta == doctest::Approx(0.0));
  const std::vector<double> hi = {5, 6}, lo = {1, 2, 3};
  CHECK(cliffs_delta(hi, lo).delta == 1.0);
  CHECK(cliffs_delta(lo, hi).delta == -1.0);
  CHECK(cliffs_delta(lo, hi).level == EffectLevel::Large);
  CHECK_THROWS_AS(cliffs_delta(std::vector<double>{}, lo), DataError);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x(1 + rng() % 20), y(1 + rng() % 20);
    for (double& v : x) v = double(rng() % 7);
    for (double& v : y) v = double(rng() % 7);
    long gt = 0, lt = 0;
    for (double xi : x)
      for (double yj : y) {
        gt += xi > yj;
        lt += xi < yj;
      }
    CHECK(cliffs_delta(x, y).delta == doctest::Approx(double(gt - lt) / double(x.size() * y.size())).epsilon(1e-15));
  }
}

TEST_CASE("exact wilcoxon matches full enumeration for n <= 12") {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto d = tie_free(rng, n, 0.3 * testing::uniform(rng, 0, 1));
      const std::vector<double> zeros(n, 0.0);
      const WilcoxonResult r = wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Exact);
      CHECK(r.exact);
      CHECK(r.n == n);
      CHECK(r.p == doctest::Approx(enumerate_p(d)).epsilon(1e-12));
      CHECK(wilcoxon_signed_rank(d, zeros).p == r.p);
    }
  }
}

TEST_CASE("wilcoxon examples") {
  const std::vector<double> x = {1.1, 2.2, 3.3, 4.4, 5.5}, y(5, 0.0);
  const WilcoxonResult r = wilcoxon_signed_rank(x, y);
  CHECK(r.w_plus == 15.0);
  CHECK(r.p == doctest::Approx(2.0 / 32.0));
  const std::vector<double> with_zero = {1, 2, 3, 4, 5, 0}, ref(6, 0.0);
  CHECK(wilcoxon_signed_rank(with_zero, ref).n == 5);
  CHECK_THROWS_AS(wilcoxon_signed_rank(x, std::vector<double>(4, 0.0)), DataError);
  CHECK_THROWS_AS(wilcoxon_signed_rank(y, y), DataError);
  CHECK(wilcoxon_signed_rank(std::vector<double>{2.0}, std::vector<double>{1.0}).p == 1.0);
  std::mt19937_64 rng(3);
  const auto big = tie_free(rng, 20, 0.0);
  CHECK_FALSE(wilcoxon_signed_rank(big, std::vector<double>(20, 0.0)).exact);
}

TEST_CASE("large-sample approximation is within 0.01 of exact for 8 <= n <= 12") {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (std::size_t n = 8; n <= 12; ++n) {
    for (int rep = 0; rep < 300; ++rep) {
      const auto d = tie_free(rng, n, 0.4 * testing::uniform(rng, 0, 1));
      const std::vector<double> zeros(n, 0.0);
      const double exact = wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Exact).p;
      const double approx = wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Edgeworth).p;
      worst = std::max(worst, std::fabs(exact - approx));
    }
  }
  CHECK(worst <= 0.01);
}

TEST_CASE("plain normal approximation misses the 0.01 band at n = 8") {
  double worst = 0.0;
  for (std::uint32_t mask = 0; mask < 256; ++mask) {
    std::vector<double> d(8);
    for (std::size_t i = 0; i < 8; ++i) d[i] = (mask >> i & 1) ? double(i + 1) : -double(i + 1);
    const std::vector<double> zeros(8, 0.0);
    worst = std::max(worst, std::fabs(wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Exact).p -
                                      wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Normal).p));
  }
  CHECK(worst > 0.01);
  CHECK(worst < 0.03);
}

TEST_CASE("exact wilcoxon handles tied magnitudes") {
  const std::vector<double> d = {1, -1, 2, 2, 3, 4}, zeros(6, 0.0);
  // Ranks: 1.5, 1.5, 3.5, 3.5, 5, 6; W+ = 1.5 + 3.5 + 3.5 + 5 + 6 = 19.5.
  const WilcoxonResult r = wilcoxon_signed_rank(d, zeros, WilcoxonMethod::Exact);
  CHECK(r.w_plus == 19.5);
  const double ranks[] = {1.5, 1.5, 3.5, 3.5, 5, 6};
  int le = 0, ge = 0;
  for (int mask = 0; mask < 64; ++mask) {
    double w = 0;
    for (int i = 0; i < 6; ++i)
      if (mask >> i & 1) w += ranks[i];
    le += w <= 19.5;
    ge += w >= 19.5;
  }
  CHECK(r.p == doctest::Approx(std::min(1.0, 2.0 * std::min(le, ge) / 64.0)));
}

TEST_CASE("win tie loss verdicts") {
  std::vector<double> ours, theirs;
  for (int i = 0; i < 10; ++i) {
    ours.push_back(0.9 + 0.01 * i);
    theirs.push_back(0.5 + 0.01 * i);
  }
  const Verdict win = win_tie_loss(ours, theirs);
  CHECK(win.outcome == Outcome::Win);
  CHECK(win.level == EffectLevel::Large);
  CHECK(win.p == doctest::Approx(2.0 / 1024.0));
  CHECK(format_p_delta(win) == "<0.05(+Large)");
  CHECK(win_tie_loss(theirs, ours).outcome == Outcome::Loss);
  CHECK(format_p_delta(win_tie_loss(theirs, ours)) == "<0.05(-Large)");

  // Significant but negligible effect.
  std::vector<double> a, b;
  for (int i = 0; i < 30; ++i) {
    b.push_back(i);
    a.push_back(i + 0.01);
  }
  const Verdict tiny = win_tie_loss(a, b);
  CHECK(tiny.p < 0.05);
  CHECK(tiny.delta == doctest::Approx(30.0 / 900.0));
  CHECK(tiny.outcome == Outcome::Tie);

  // Large effect but too few pairs to reach significance.
  const std::vector<double> x = {1, 1, 1, 1}, y = {0, 0, 0, 0};
  const Verdict few = win_tie_loss(x, y);
  CHECK(few.p == 0.125);
  CHECK(few.outcome == Outcome::Tie);
  CHECK(format_p_delta(few) == "0.125(+Large)");

  // Identical samples.
  CHECK(win_tie_loss(ours, ours).outcome == Outcome::Tie);
  CHECK_THROWS_AS(win_tie_loss(ours, x), DataError);
}

TEST_CASE("p value cell formatting") {
  CHECK(format_p_delta({Outcome::Tie, 0.6, -0.2, EffectLevel::Small}) == "0.6(-Small)");
  CHECK(format_p_delta({Outcome::Tie, 0.1234, 0.0, EffectLevel::Negligible}) == "0.123(+Negligible)");
  CHECK(format_p_delta({Outcome::Tie, 0.05, 0.4, EffectLevel::Medium}) == "0.05(+Medium)");
  CHECK(outcome_name(Outcome::Loss) == "Loss");
}
