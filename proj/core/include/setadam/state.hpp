#pragma once

#include <span>
#include <vector>

#include "setadam/partition.hpp"

namespace setadam {

// Flat model parameters plus the partition that slices them into layers.
struct ModelParams {
  std::vector<real> values;
  LayerPartition partition;

  static ModelParams make(LayerPartition partition, real fill = 0);
  static ModelParams make(LayerPartition partition, std::vector<real> values);
};

// Gradient of the objective at the current iterate; same layout as the model.
struct GradientSnapshot {
  std::vector<real> values;
};

// First/second momentum buffers and the iteration counter. Zero-initialized;
// v stays elementwise nonnegative.
struct MomentState {
  std::vector<real> m;
  std::vector<real> v;
  long t = 0;

  static MomentState zeros(std::size_t dim);
};

bool all_finite(std::span<const real> xs);

}  // namespace setadam
