#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "setadam/real.hpp"

namespace setadam {

struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;           // feature columns
  std::vector<real> features;     // row-major, rows x cols
  std::vector<real> labels;       // class id or regression target, size rows
  std::uint64_t seed = 0;

  std::span<const real> row(std::size_t i) const;
  bool single_class() const;
};

// Two interleaved half-circles, the classic toy classification set.
// Class 0 sits on (cos t, sin t), class 1 on (1 - cos t, 1/2 - sin t) for
// t evenly spaced over [0, pi]; Gaussian noise of the given scale is added to
// both coordinates. Classes are balanced (class 0 gets the extra point when n
// is odd) and the result is a pure function of (n, noise, seed).
Dataset make_two_moons(std::size_t n, real noise, std::uint64_t seed);

// Numeric CSV with a header row; the named column becomes the label and the
// remaining columns the features, row order preserved.
Dataset load_csv_dataset(const std::string& path, const std::string& label_column);

}  // namespace setadam
