#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "setadam/real.hpp"

namespace setadam {

// Contiguous slicing of a flat parameter vector into per-layer segments.
// A "layer" is one parameter tensor: a weight matrix and its bias vector
// count as separate entries. Immutable once built.
class LayerPartition {
 public:
  LayerPartition() = default;

  // layer_sizes must be nonempty with every entry >= 1.
  static LayerPartition from_sizes(std::vector<std::size_t> layer_sizes);

  std::size_t layer_count() const { return sizes_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t layer_size(std::size_t l) const;
  std::size_t layer_offset(std::size_t l) const;

  // View of layer l (0-based) inside a flat vector of length dim().
  std::span<real> view(std::span<real> flat, std::size_t l) const;
  std::span<const real> view(std::span<const real> flat, std::size_t l) const;

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  bool operator==(const LayerPartition&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
};

}  // namespace setadam
