#include <cmath>
#include <random>

#include "doctest.h"
#include "simast/error.hpp"
#include "simast/metrics.hpp"

using namespace simast;

namespace {

ConfusionCounts counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  ConfusionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.tn = tn;
  return c;
}

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      ++pairs;
      good += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  return good / double(pairs);
}

}  // namespace

TEST_CASE("confusion counts from labels") {
  ConfusionCounts c;
  c.add(1, 1);
  c.add(1, 0);
  c.add(0, 1);
  c.add(0, 0);
  c.add(0, 0);
  CHECK(c == counts(1, 1, 1, 2));
  CHECK(accuracy(c) == doctest::Approx(0.6));
  CHECK_THROWS_AS(accuracy(ConfusionCounts{}), DataError);
}

TEST_CASE("hand-computed F1 and MCC") {
  const ConfusionCounts c = counts(50, 10, 5, 35);
  // precision 5/6, recall 10/11, F1 = 2pr/(p+r) = 100/115.
  CHECK(precision(c) == doctest::Approx(50.0 / 60.0));
  CHECK(recall(c) == doctest::Approx(50.0 / 55.0));
  CHECK(f1(c) == doctest::Approx(100.0 / 115.0).epsilon(1e-12));
  CHECK(f1(c) == doctest::Approx(0.8696).epsilon(1e-4));
  // (50*35 - 10*5) / sqrt(60*55*45*40) = 1700 / sqrt(5940000).
  CHECK(mcc(c) == doctest::Approx(1700.0 / std::sqrt(5940000.0)).epsilon(1e-12));
  CHECK(std::fabs(mcc(c) - 0.6975) < 1e-4);
}

TEST_CASE("degenerate metric conventions") {
  const ConfusionCounts all_neg = counts(0, 0, 5, 5);
  CHECK(f1(all_neg) == 0.0);
  CHECK(f1_degenerate(all_neg));
  CHECK(mcc(all_neg) == 0.0);
  CHECK(mcc_degenerate(all_neg));
  CHECK_FALSE(mcc_degenerate(counts(1, 1, 1, 1)));
  CHECK(mcc(counts(5, 0, 0, 5)) == 1.0);
  CHECK(mcc(counts(0, 5, 5, 0)) == -1.0);
}

TEST_CASE("MCC invariances") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto tp = 1 + rng() % 50, fp = 1 + rng() % 50, fn = 1 + rng() % 50, tn = 1 + rng() % 50;
    const double m = mcc(counts(tp, fp, fn, tn));
    CHECK(mcc(counts(tn, fn, fp, tp)) == doctest::Approx(m).epsilon(1e-12));
    CHECK(mcc(counts(fp, tp, tn, fn)) == doctest::Approx(-m).epsilon(1e-12));
    CHECK(mcc(counts(3 * tp, 3 * fp, 3 * fn, 3 * tn)) == doctest::Approx(m).epsilon(1e-12));
    CHECK(std::fabs(m) <= 1.0);
  }
}

TEST_CASE("rank AUC equals brute-force pair enumeration exactly") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = double(rng() % 10) / 10.0;
      y[i] = int(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auc(s, y) == brute_auc(s, y));
  }
}

TEST_CASE("AUC examples and errors") {
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
  const std::vector<int> y = {0, 0, 1, 1};
  CHECK(auc(s, y) == 0.75);
  const std::vector<double> flat = {0.5, 0.5, 0.5};
  CHECK(auc(flat, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(auc(flat, std::vector<int>{1, 1, 1}), DataError);
  CHECK_THROWS_AS(auc(flat, std::vector<int>{1, 0}), DataError);
}
