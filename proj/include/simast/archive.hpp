#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simast/tensor.hpp"

namespace simast {

// Checkpoint layout (little-endian):
//   "SIMASTCK" | u32 version | u32 metadata length | metadata bytes |
//   u64 tensor count | per tensor: u32 name length, name, u32 rank,
//   u64 dims[rank], f64 data[product(dims)] (row-major)

inline constexpr std::uint32_t kArchiveVersion = 1;

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

struct Archive {
  std::string metadata;  // free-form text, e.g. the model config
  std::vector<NamedTensor> tensors;

  /// Throws DataError when absent.
  const ad::Tensor& get(const std::string& name) const;
};

void save_archive(const std::filesystem::path& path, const Archive& archive);
/// Throws DataError on a bad magic, unsupported version or truncation.
Archive load_archive(const std::filesystem::path& path);

}  // namespace simast
