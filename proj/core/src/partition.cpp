#include "setadam/partition.hpp"

#include <stdexcept>
#include <string>

namespace setadam {

LayerPartition LayerPartition::from_sizes(std::vector<std::size_t> layer_sizes) {
  if (layer_sizes.empty()) {
    throw std::invalid_argument("LayerPartition: layer size list is empty");
  }
  LayerPartition p;
  p.offsets_.reserve(layer_sizes.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] == 0) {
      throw std::invalid_argument("LayerPartition: layer " + std::to_string(i) +
                                  " has zero size");
    }
    p.offsets_.push_back(offset);
    offset += layer_sizes[i];
  }
  p.sizes_ = std::move(layer_sizes);
  p.dim_ = offset;
  return p;
}

std::size_t LayerPartition::layer_size(std::size_t l) const {
  if (l >= sizes_.size()) {
    throw std::out_of_range("LayerPartition: layer index " + std::to_string(l) +
                            " out of range (L=" + std::to_string(sizes_.size()) + ")");
  }
  return sizes_[l];
}

std::size_t LayerPartition::layer_offset(std::size_t l) const {
  if (l >= offsets_.size()) {
    throw std::out_of_range("LayerPartition: layer index " + std::to_string(l) +
                            " out of range (L=" + std::to_string(offsets_.size()) + ")");
  }
  return offsets_[l];
}

std::span<real> LayerPartition::view(std::span<real> flat, std::size_t l) const {
  if (flat.size() != dim_) {
    throw std::invalid_argument("LayerPartition: vector length " +
                                std::to_string(flat.size()) +
                                " does not match partition dimension " +
                                std::to_string(dim_));
  }
  return flat.subspan(layer_offset(l), layer_size(l));
}

std::span<const real> LayerPartition::view(std::span<const real> flat,
                                           std::size_t l) const {
  if (flat.size() != dim_) {
    throw std::invalid_argument("LayerPartition: vector length " +
                                std::to_string(flat.size()) +
                                " does not match partition dimension " +
                                std::to_string(dim_));
  }
  return flat.subspan(layer_offset(l), layer_size(l));
}

}  // namespace setadam
