#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "setadam/partition.hpp"
#include "setadam/rng.hpp"
#include "setadam/state.hpp"

using namespace setadam;

TEST_CASE("partition from sizes computes offsets and dimension") {
  const LayerPartition p = LayerPartition::from_sizes({3, 2});
  CHECK(p.layer_count() == 2);
  CHECK(p.dim() == 5);
  CHECK(p.offsets() == std::vector<std::size_t>{0, 3});

  const LayerPartition single = LayerPartition::from_sizes({1});
  CHECK(single.dim() == 1);
  CHECK(single.layer_count() == 1);

  const LayerPartition mlp = LayerPartition::from_sizes({64, 64, 10});
  CHECK(mlp.offsets() == std::vector<std::size_t>{0, 64, 128});
  CHECK(mlp.dim() == 138);
}

TEST_CASE("partition rejects empty and zero-size layers") {
  CHECK_THROWS_AS(LayerPartition::from_sizes({}), std::invalid_argument);
  CHECK_THROWS_AS(LayerPartition::from_sizes({3, 0, 2}), std::invalid_argument);
}

TEST_CASE("layer views slice the flat vector") {
  const LayerPartition p = LayerPartition::from_sizes({3, 2});
  std::vector<real> values{1, 2, 3, 4, 5};

  const auto second = p.view(std::span<const real>(values), 1);
  CHECK(second.size() == 2);
  CHECK(second[0] == 4);
  CHECK(second[1] == 5);

  std::vector<real> zeros(5, 0);
  const auto first = p.view(std::span<const real>(zeros), 0);
  CHECK(first.size() == 3);
  for (real x : first) CHECK(x == 0);

  const LayerPartition single = LayerPartition::from_sizes({1});
  std::vector<real> one{7};
  CHECK(single.view(std::span<const real>(one), 0)[0] == 7);

  CHECK_THROWS_AS(p.view(std::span<const real>(values), 2), std::out_of_range);
  std::vector<real> wrong_length{1, 2};
  CHECK_THROWS_AS(p.view(std::span<const real>(wrong_length), 0), std::invalid_argument);
}

TEST_CASE("writing through views round-trips and stays disjoint") {
  const LayerPartition p = LayerPartition::from_sizes({4, 1, 3, 2});
  std::vector<real> flat(p.dim(), 0);

  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    auto view = p.view(std::span<real>(flat), l);
    for (std::size_t i = 0; i < view.size(); ++i) {
      view[i] = static_cast<real>(100 * (l + 1) + i);
    }
  }
  // concatenation of the layer contents reproduces the flat vector
  std::size_t k = 0;
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    for (std::size_t i = 0; i < p.layer_size(l); ++i, ++k) {
      CHECK(flat[k] == static_cast<real>(100 * (l + 1) + i));
    }
  }

  // mutating one layer leaves everything outside its range untouched
  const std::vector<real> before = flat;
  auto middle = p.view(std::span<real>(flat), 2);
  for (real& x : middle) x = -1;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const bool inside = i >= p.layer_offset(2) && i < p.layer_offset(2) + p.layer_size(2);
    if (inside) {
      CHECK(flat[i] == -1);
    } else {
      CHECK(flat[i] == before[i]);
    }
  }
}

TEST_CASE("moment state starts at zero") {
  const MomentState s = MomentState::zeros(4);
  CHECK(s.t == 0);
  for (real x : s.m) CHECK(x == 0);
  for (real x : s.v) CHECK(x == 0);
}

TEST_CASE("all_finite flags NaN and infinity") {
  std::vector<real> ok{1, -2, 0};
  CHECK(all_finite(ok));
  std::vector<real> with_nan{1, std::nan(""), 0};
  CHECK_FALSE(all_finite(with_nan));
  std::vector<real> with_inf{1, std::numeric_limits<real>::infinity()};
  CHECK_FALSE(all_finite(with_inf));
}

TEST_CASE("counter rng is reproducible and stream-separated") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  CounterRng c(42, 1);
  CounterRng d(43);
  bool differs = false;
  CounterRng a2(42);
  for (int i = 0; i < 16; ++i) {
    if (a2.next_u64() != c.next_u64() || c.counter() != d.counter()) {
      differs = true;
    }
    (void)d.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("counter rng random access matches the sequential stream") {
  CounterRng rng(7, 3);
  for (std::uint64_t k = 0; k < 20; ++k) {
    CHECK(rng.next_u64() == CounterRng::value_at(7, 3, k));
  }
}

TEST_CASE("rng output ranges") {
  CounterRng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.next_below(10) < 10);
  }
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.1);
}
