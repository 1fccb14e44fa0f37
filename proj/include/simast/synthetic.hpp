#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simast/dataset.hpp"

namespace simast {

struct SyntheticOptions {
  std::size_t pairs = 400;
  std::uint64_t seed = 7;
  double accept_fraction = 0.5;
};

/// Random method-level review pairs in the parser subset. A label-1 pair's
/// revision inserts a guard at the top of the body, e.g.
///   if (key == null) { return 0; }
/// A label-0 revision inserts a call, declaration or assignment somewhere
/// in the body, or makes a small edit (renamed local, changed literal, appended
/// call). Exactly round(pairs * accept_fraction) pairs are labelled 1.
std::vector<ReviewRecord> generate_synthetic(const SyntheticOptions& options);

}  // namespace simast
