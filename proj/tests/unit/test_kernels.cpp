#include <random>

#include "doctest.h"
#include "simast/error.hpp"
#include "simast/kernels.hpp"
#include "support.hpp"

using namespace simast;
namespace k = simast::kernels;

namespace {

std::vector<const k::KernelTable*> tables() {
  std::vector<const k::KernelTable*> out{&k::scalar_table()};
  if (k::supported(k::Backend::Avx2)) out.push_back(&k::table(k::Backend::Avx2));
  return out;
}

double naive_dot(const std::vector<double>& x, const std::vector<double>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (long double)x[i] * y[i];
  return double(s);
}

// C += op(A) op(B) with explicit index arithmetic.
std::vector<double> naive_gemm(char mode, std::size_t m, std::size_t kk, std::size_t n, const std::vector<double>& a,
                               const std::vector<double>& b, std::vector<double> c) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (std::size_t p = 0; p < kk; ++p) {
        const double av = mode == 't' ? a[p * m + i] : a[i * kk + p];
        const double bv = mode == 'n' ? b[j * kk + p] : b[p * n + j];
        s += (long double)av * bv;
      }
      c[i * n + j] += double(s);
    }
  return c;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(k::supported(k::Backend::Scalar));
  CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
  CHECK(k::backend_name(k::Backend::Avx2) == "avx2");
}

TEST_CASE("dot and axpy agree with the naive oracle including odd tails") {
  std::mt19937_64 rng(1);
  for (const auto* t : tables()) {
    CAPTURE(t->name);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 101u}) {
      const auto x = testing::random_vector(rng, n), y = testing::random_vector(rng, n);
      CHECK(t->dot(x.data(), y.data(), n) == doctest::Approx(naive_dot(x, y)).epsilon(1e-12));
      auto z = y;
      t->axpy(0.37, x.data(), z.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == doctest::Approx(y[i] + 0.37 * x[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("gemm variants agree with the naive oracle") {
  std::mt19937_64 rng(2);
  const std::vector<std::array<std::size_t, 3>> shapes = {{1, 1, 1}, {1, 5, 3}, {3, 1, 7}, {4, 4, 4},
                                                          {5, 7, 9}, {8, 3, 13}, {17, 9, 5}, {2, 33, 6}};
  for (const auto* t : tables()) {
    CAPTURE(t->name);
    for (auto [m, kk, n] : shapes) {
      const auto c0 = testing::random_vector(rng, m * n);
      const auto a = testing::random_vector(rng, m * kk);
      const auto b_kn = testing::random_vector(rng, kk * n);
      const auto b_nk = testing::random_vector(rng, n * kk);
      const auto a_km = testing::random_vector(rng, kk * m);

      auto c = c0;
      t->gemm_nn(m, kk, n, a.data(), b_kn.data(), c.data());
      auto want = naive_gemm('x', m, kk, n, a, b_kn, c0);
      for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));

      c = c0;
      t->gemm_nt(m, kk, n, a.data(), b_nk.data(), c.data());
      want = naive_gemm('n', m, kk, n, a, b_nk, c0);
      for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));

      c = c0;
      t->gemm_tn(m, kk, n, a_km.data(), b_kn.data(), c.data());
      want = naive_gemm('t', m, kk, n, a_km, b_kn, c0);
      for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("backends agree with each other") {
  if (!k::supported(k::Backend::Avx2)) return;
  const auto& s = k::scalar_table();
  const auto& v = k::table(k::Backend::Avx2);
  std::mt19937_64 rng(3);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = testing::random_vector(rng, n), y = testing::random_vector(rng, n);
    CHECK(s.dot(x.data(), y.data(), n) == doctest::Approx(v.dot(x.data(), y.data(), n)).epsilon(1e-13));
  }
  const std::size_t m = 11, kk = 19, n = 23;
  const auto a = testing::random_vector(rng, m * kk), b = testing::random_vector(rng, kk * n);
  std::vector<double> c1(m * n, 0.0), c2(m * n, 0.0);
  s.gemm_nn(m, kk, n, a.data(), b.data(), c1.data());
  v.gemm_nn(m, kk, n, a.data(), b.data(), c2.data());
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));
}

TEST_CASE("select switches the active backend") {
  const k::Backend before = k::active_backend();
  k::select(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  CHECK(k::active().name == "scalar");
  if (k::supported(k::Backend::Avx2)) {
    k::select(k::Backend::Avx2);
    CHECK(k::active().name == "avx2");
  } else {
    CHECK_THROWS_AS(k::select(k::Backend::Avx2), ConfigError);
  }
  k::select(before);
}
