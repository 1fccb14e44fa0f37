#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision inner loops behind the tensor core. Each backend
// provides the same table; the best one supported by the running CPU is
// selected on first use. All gemm variants accumulate into C (row-major).

namespace simast::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// C(m x n) += A(m x k) * B(k x n)
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  /// C(m x n) += A(m x k) * B(n x k)^T
  void (*gemm_nt)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  /// C(m x n) += A(k x m)^T * B(k x n)
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

bool supported(Backend backend);
const KernelTable& table(Backend backend);

/// Currently active backend.
Backend active_backend();
const KernelTable& active();

/// Switches the active backend. Throws ConfigError when unsupported.
void select(Backend backend);

std::string_view backend_name(Backend backend);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace simast::kernels
