#pragma once

#include <cstddef>
#include <vector>

#include "simast/tensor.hpp"

namespace simast::ad {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moment buffers are keyed by parameter position.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options = {});

  /// Applies one update and zeroes the gradients. Throws DataError when a
  /// parameter never received a gradient.
  void step();
  void zero_grad();

  std::size_t steps() const noexcept { return step_; }
  const AdamOptions& options() const noexcept { return options_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
  AdamOptions options_;
  std::size_t step_ = 0;
};

}  // namespace simast::ad
