#include "setadam/state.hpp"

#include <cmath>
#include <stdexcept>

namespace setadam {

ModelParams ModelParams::make(LayerPartition partition, real fill) {
  ModelParams p;
  p.values.assign(partition.dim(), fill);
  p.partition = std::move(partition);
  return p;
}

ModelParams ModelParams::make(LayerPartition partition, std::vector<real> values) {
  if (values.size() != partition.dim()) {
    throw std::invalid_argument("ModelParams: value count does not match partition");
  }
  ModelParams p;
  p.values = std::move(values);
  p.partition = std::move(partition);
  return p;
}

MomentState MomentState::zeros(std::size_t dim) {
  MomentState s;
  s.m.assign(dim, 0);
  s.v.assign(dim, 0);
  s.t = 0;
  return s;
}

bool all_finite(std::span<const real> xs) {
  for (real x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace setadam
