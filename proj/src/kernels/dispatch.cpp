#include <atomic>

#include "simast/error.hpp"
#include "simast/kernels.hpp"

namespace simast::kernels {

namespace {

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

std::atomic<const KernelTable*>& current_table() {
  static std::atomic<const KernelTable*> t{&table(current().load())};
  return t;
}

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!supported(backend)) {
    throw ConfigError(std::string("kernel backend '") + std::string(backend_name(backend)) +
                      "' is not supported on this CPU");
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (backend == Backend::Avx2) return avx2_table();
#endif
  return scalar_table();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const KernelTable& active() { return *current_table().load(std::memory_order_relaxed); }

void select(Backend backend) {
  const KernelTable& t = table(backend);
  current().store(backend, std::memory_order_relaxed);
  current_table().store(&t, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace simast::kernels
