#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "setadam/problem.hpp"
#include "setadam/rng.hpp"
#include "setadam/update_rules.hpp"
#include "support/finite_difference.hpp"

using namespace setadam;
namespace fdt = setadam::testing;

namespace {

std::vector<real> random_point(std::size_t d, CounterRng& rng, real scale = 1) {
  std::vector<real> x(d);
  for (real& v : x) v = scale * static_cast<real>(rng.next_normal());
  return x;
}

struct TempCsv {
  std::filesystem::path path;
  explicit TempCsv(const std::string& content) {
    path = std::filesystem::temp_directory_path() /
           ("setadam_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << content;
  }
  ~TempCsv() { std::filesystem::remove(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("quadratic problems expose the analytic optimum") {
  const QuadraticProblem identity(std::vector<real>{1, 1, 1}, {0, 0, 0});
  CHECK(identity.optimum().value() == std::vector<real>{0, 0, 0});
  CHECK(identity.optimum_value().value() == 0);
  CHECK(identity.loss(std::vector<real>{0, 0, 0}) == 0);

  const QuadraticProblem diag(std::vector<real>{1, 10}, {1, 10});
  CHECK(diag.optimum().value()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(diag.optimum().value()[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(diag.optimum_value().value() == doctest::Approx(-5.5).epsilon(1e-15));

  const GradientSnapshot g = diag.gradient(std::vector<real>{0, 0});
  CHECK(g.values[0] == doctest::Approx(-1.0));
  CHECK(g.values[1] == doctest::Approx(-10.0));
}

TEST_CASE("dense quadratic solves through Cholesky and rejects bad matrices") {
  const std::vector<real> a{4, 1, 0,
                            1, 3, 1,
                            0, 1, 2};
  const std::vector<real> b{1, -2, 0.5};
  const QuadraticProblem dense(DenseMatrix{a}, b);

  // A theta* = b
  const std::vector<real> star = dense.optimum().value();
  for (std::size_t i = 0; i < 3; ++i) {
    real row = 0;
    for (std::size_t j = 0; j < 3; ++j) row += a[i * 3 + j] * star[j];
    CHECK(row == doctest::Approx(b[i]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(QuadraticProblem(DenseMatrix{{1, 2, 2, 1}}, {0, 0}),
                  std::invalid_argument);  // indefinite
  CHECK_THROWS_AS(QuadraticProblem(DenseMatrix{{1, 2, 3, 1}}, {0, 0}),
                  std::invalid_argument);  // not symmetric
  CHECK_THROWS_AS(QuadraticProblem(std::vector<real>{1, 0}, {0, 0}),
                  std::invalid_argument);  // zero curvature on the diagonal
}

TEST_CASE("quadratic partitions: single layer or one layer per coordinate") {
  const QuadraticProblem single(std::vector<real>{1, 2, 3}, {0, 0, 0});
  CHECK(single.partition().layer_count() == 1);
  const QuadraticProblem per_coord(std::vector<real>{1, 2, 3}, {0, 0, 0}, true);
  CHECK(per_coord.partition().layer_count() == 3);
}

TEST_CASE("logistic regression at zero weights predicts ln 2 per sample") {
  const Dataset moons = make_two_moons(64, 0.1, 3);
  const LogisticRegressionProblem problem(moons, 0);
  const std::vector<real> zero(problem.dim(), 0);
  CHECK(problem.loss(zero) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(problem.partition().layer_count() == 2);
  CHECK(problem.partition().sizes() == std::vector<std::size_t>{2, 1});
}

TEST_CASE("logistic regression drives a separable two-point set to zero loss") {
  Dataset tiny;
  tiny.rows = 2;
  tiny.cols = 1;
  tiny.features = {-1, 1};
  tiny.labels = {0, 1};
  const LogisticRegressionProblem problem(tiny, 0);

  ModelParams params = ModelParams::make(problem.partition(), 0.0);
  MomentState state = MomentState::zeros(problem.dim());
  HyperParams hp;
  hp.eta = 0.05;
  for (int step = 0; step < 2000; ++step) {
    const GradientSnapshot g = problem.gradient(params.values);
    adam_step(params, g, state, hp);
  }
  CHECK(problem.loss(params.values) < 0.05);
  CHECK(problem.accuracy(params.values, tiny) == 1.0);
}

TEST_CASE("logistic regression flags single-class datasets") {
  Dataset degenerate;
  degenerate.rows = 3;
  degenerate.cols = 1;
  degenerate.features = {1, 2, 3};
  degenerate.labels = {1, 1, 1};
  const LogisticRegressionProblem problem(degenerate, 0.1);
  CHECK(problem.degenerate_single_class());

  Dataset bad = degenerate;
  bad.labels = {0, 2, 1};
  CHECK_THROWS_AS(LogisticRegressionProblem(bad, 0), std::invalid_argument);
}

TEST_CASE("logistic gradient matches central differences") {
  const Dataset moons = make_two_moons(48, 0.15, 11);
  const LogisticRegressionProblem problem(moons, 0.01);
  CounterRng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<real> theta = random_point(problem.dim(), rng);
    CHECK(fdt::gradient_check(problem, theta) < 1e-6);
  }
}

TEST_CASE("mlp structure and width validation") {
  const Dataset moons = make_two_moons(32, 0.1, 5);
  const MlpProblem mlp({2, 8, 2}, Activation::tanh, moons);
  CHECK(mlp.partition().layer_count() == 4);  // W1, b1, W2, b2
  CHECK(mlp.partition().sizes() == std::vector<std::size_t>{16, 8, 16, 2});
  CHECK(mlp.dim() == 42);

  Dataset mismatched = moons;
  mismatched.cols = 3;
  mismatched.features.resize(3 * moons.rows, 0);
  CHECK_THROWS_AS(MlpProblem({2, 8, 2}, Activation::tanh, mismatched),
                  std::invalid_argument);
  CHECK_THROWS_AS(MlpProblem({2}, Activation::tanh, moons), std::invalid_argument);

  Dataset bad_labels = moons;
  bad_labels.labels[0] = 7;
  CHECK_THROWS_AS(MlpProblem({2, 8, 2}, Activation::tanh, bad_labels),
                  std::invalid_argument);
}

TEST_CASE("mlp gradients match central differences") {
  const Dataset moons = make_two_moons(24, 0.15, 7);
  const MlpProblem tanh_mlp({2, 6, 5, 2}, Activation::tanh, moons);
  CounterRng rng(103);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<real> theta = random_point(tanh_mlp.dim(), rng, 0.5);
    CHECK(fdt::gradient_check(tanh_mlp, theta) < 1e-4);
  }

  // minibatch gradients
  const std::vector<std::size_t> batch{0, 3, 5, 7, 11};
  const std::vector<real> theta = random_point(tanh_mlp.dim(), rng, 0.5);
  CHECK(fdt::gradient_check(tanh_mlp, theta, batch) < 1e-4);

  const MlpProblem relu_mlp({2, 6, 2}, Activation::relu, moons);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<real> point = random_point(relu_mlp.dim(), rng, 0.5);
    CHECK(fdt::gradient_check(relu_mlp, point) < 1e-4);
  }
}

TEST_CASE("zero-weight relu net has dead hidden weights but live output bias") {
  const Dataset moons = make_two_moons(16, 0.1, 9);
  const MlpProblem relu_mlp({2, 4, 2}, Activation::relu, moons);
  const std::vector<real> zero(relu_mlp.dim(), 0);
  const GradientSnapshot g = relu_mlp.gradient(zero);
  const LayerPartition& part = relu_mlp.partition();

  // W1, b1 and W2 see no signal: relu'(0) = 0 and the zero weights block
  // every path; the output bias path stays finite.
  for (std::size_t l = 0; l + 1 < part.layer_count(); ++l) {
    for (real x : part.view(std::span<const real>(g.values), l)) {
      CHECK(x == 0);
    }
  }
  for (real x : part.view(std::span<const real>(g.values), 3)) {
    CHECK(std::isfinite(x));
  }
  // on a balanced dataset the softmax deltas cancel exactly; a single-class
  // batch shows the live bias path
  std::vector<std::size_t> ones;
  for (std::size_t r = 0; r < moons.rows; ++r) {
    if (moons.labels[r] == 1) ones.push_back(r);
  }
  const GradientSnapshot gb = relu_mlp.gradient(zero, ones);
  real magnitude = 0;
  for (real x : part.view(std::span<const real>(gb.values), 3)) {
    CHECK(std::isfinite(x));
    magnitude += std::abs(x);
  }
  CHECK(magnitude > 0);

  // finite differences agree under the relu'(0) = 0 convention
  const std::vector<real> fd = fdt::fd_gradient(relu_mlp, zero);
  for (std::size_t i = 0; i < fd.size(); ++i) {
    CHECK(g.values[i] == doctest::Approx(fd[i]).epsilon(1e-6));
  }
}

TEST_CASE("minibatch means over a partition of the data equal the full batch") {
  const Dataset moons = make_two_moons(64, 0.2, 13);
  const MlpProblem mlp({2, 5, 2}, Activation::tanh, moons);
  CounterRng rng(107);
  const std::vector<real> theta = random_point(mlp.dim(), rng, 0.4);

  const GradientSnapshot full = mlp.gradient(theta);
  std::vector<real> averaged(mlp.dim(), 0);
  std::vector<std::size_t> indices(64);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  const std::size_t batch = 16;
  for (std::size_t lo = 0; lo < 64; lo += batch) {
    const auto part = std::span<const std::size_t>(indices).subspan(lo, batch);
    const GradientSnapshot g = mlp.gradient(theta, part);
    for (std::size_t i = 0; i < averaged.size(); ++i) averaged[i] += g.values[i];
  }
  for (real& x : averaged) x /= (64.0 / batch);
  for (std::size_t i = 0; i < averaged.size(); ++i) {
    CHECK(std::abs(averaged[i] - full.values[i]) <= 1e-10);
  }
}

TEST_CASE("two moons is deterministic and sits on the canonical arcs") {
  const Dataset a = make_two_moons(4, 0.0, 7);
  const Dataset b = make_two_moons(4, 0.0, 7);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  // closed-form arc parametrization: two points per class at t = 0 and pi
  REQUIRE(a.rows == 4);
  const real pi = std::acos(real(-1));
  CHECK(a.labels == std::vector<real>{0, 0, 1, 1});
  CHECK(a.features[0] == doctest::Approx(std::cos(0.0)));
  CHECK(a.features[1] == doctest::Approx(std::sin(0.0)));
  CHECK(a.features[2] == doctest::Approx(std::cos(pi)));
  CHECK(a.features[3] == doctest::Approx(std::sin(pi)));
  CHECK(a.features[4] == doctest::Approx(1 - std::cos(0.0)));
  CHECK(a.features[5] == doctest::Approx(0.5 - std::sin(0.0)));
  CHECK(a.features[6] == doctest::Approx(1 - std::cos(pi)));
  CHECK(a.features[7] == doctest::Approx(0.5 - std::sin(pi)));

  // balanced classes also for odd n (extra point goes to class 0)
  const Dataset odd = make_two_moons(7, 0.3, 2);
  std::size_t zeros = 0;
  for (real label : odd.labels) zeros += label == 0;
  CHECK(zeros == 4);

  // a different seed perturbs noisy draws
  const Dataset n1 = make_two_moons(10, 0.2, 1);
  const Dataset n2 = make_two_moons(10, 0.2, 2);
  CHECK(n1.features != n2.features);

  CHECK_THROWS_AS(make_two_moons(1, 0.0, 1), std::invalid_argument);
}

TEST_CASE("csv datasets load with header and label split") {
  const TempCsv file("x0,x1,label\n1,2,0\n3,4,1\n5,6,0\n");
  const Dataset d = load_csv_dataset(file.path.string(), "label");
  CHECK(d.rows == 3);
  CHECK(d.cols == 2);
  CHECK(d.features == std::vector<real>{1, 2, 3, 4, 5, 6});
  CHECK(d.labels == std::vector<real>{0, 1, 0});
}

TEST_CASE("csv loader errors are descriptive") {
  const TempCsv missing("x0,x1,y\n1,2,0\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(missing.path.string(), "label"),
                       doctest::Contains("label"), std::runtime_error);

  const TempCsv empty("");
  CHECK_THROWS_AS(load_csv_dataset(empty.path.string(), "label"), std::runtime_error);

  const TempCsv header_only("x0,label\n");
  CHECK_THROWS_AS(load_csv_dataset(header_only.path.string(), "label"),
                  std::runtime_error);

  const TempCsv non_numeric("x0,label\n1,0\noops,1\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(non_numeric.path.string(), "label"),
                       doctest::Contains("row 1"), std::runtime_error);

  CHECK_THROWS_AS(load_csv_dataset("/nonexistent/path.csv", "label"),
                  std::runtime_error);
}

TEST_CASE("project_to_ball") {
  std::vector<real> inside{3, 0};
  project_to_ball(inside, 5);
  CHECK(inside == std::vector<real>{3, 0});

  std::vector<real> outside{3, 4};
  project_to_ball(outside, 1);
  CHECK(outside[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(outside[1] == doctest::Approx(0.8).epsilon(1e-15));

  std::vector<real> zero{0, 0, 0};
  project_to_ball(zero, 1);
  CHECK(zero == std::vector<real>{0, 0, 0});

  std::vector<real> x{1};
  CHECK_THROWS_AS(project_to_ball(x, 0), std::invalid_argument);
}

TEST_CASE("quadratic gradients match central differences") {
  CounterRng rng(109);
  const QuadraticProblem diag(std::vector<real>{1, 10, 0.5}, {1, -1, 2});
  const std::vector<real> a{4, 1, 0, 1, 3, 1, 0, 1, 2};
  const QuadraticProblem dense(DenseMatrix{a}, {1, -2, 0.5});
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(fdt::gradient_check(diag, random_point(3, rng)) < 1e-5);
    CHECK(fdt::gradient_check(dense, random_point(3, rng)) < 1e-5);
  }
}
