#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "setadam/dataset.hpp"
#include "setadam/partition.hpp"
#include "setadam/state.hpp"

namespace setadam {

// A differentiable objective with analytic gradients. Immutable after
// construction; loss/gradient evaluation is reentrant.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dim() const = 0;
  virtual const LayerPartition& partition() const = 0;
  virtual bool convex() const = 0;
  virtual bool classification() const = 0;

  // Number of samples available for minibatching; 0 means full-batch only.
  virtual std::size_t sample_count() const { return 0; }

  // Empty batch means the full objective; otherwise indices into the dataset.
  virtual real loss(std::span<const real> theta,
                    std::span<const std::size_t> batch = {}) const = 0;
  virtual GradientSnapshot gradient(std::span<const real> theta,
                                    std::span<const std::size_t> batch = {}) const = 0;

  virtual std::vector<real> initial_point(std::uint64_t seed) const;

  virtual std::optional<std::vector<real>> optimum() const { return std::nullopt; }
  virtual std::optional<real> optimum_value() const { return std::nullopt; }

  // Fraction of correctly classified rows; classifiers only.
  virtual real accuracy(std::span<const real> theta, const Dataset& data) const;
};

// Row-major d x d matrix payload for the dense quadratic constructor.
struct DenseMatrix {
  std::vector<real> values;
};

// f(theta) = 1/2 theta'A theta - b'theta with A symmetric positive definite.
// The optimum inv(A) b is solved at construction via Cholesky.
class QuadraticProblem : public Problem {
 public:
  // Diagonal A.
  QuadraticProblem(std::vector<real> a_diag, std::vector<real> b,
                   bool coordinate_layers = false);
  // Dense A, d x d with d <= 50.
  QuadraticProblem(DenseMatrix a, std::vector<real> b,
                   bool coordinate_layers = false);

  std::size_t dim() const override { return b_.size(); }
  const LayerPartition& partition() const override { return partition_; }
  bool convex() const override { return true; }
  bool classification() const override { return false; }
  real loss(std::span<const real> theta,
            std::span<const std::size_t> batch = {}) const override;
  GradientSnapshot gradient(std::span<const real> theta,
                            std::span<const std::size_t> batch = {}) const override;
  std::vector<real> initial_point(std::uint64_t seed) const override;
  std::optional<std::vector<real>> optimum() const override { return optimum_; }
  std::optional<real> optimum_value() const override { return optimum_value_; }

 private:
  void multiply(std::span<const real> x, std::span<real> out) const;

  std::vector<real> a_diag_;   // diagonal storage when dense_ is empty
  std::vector<real> dense_;    // row-major d x d
  std::vector<real> b_;
  std::vector<real> optimum_;
  real optimum_value_ = 0;
  LayerPartition partition_;
};

// Binary cross-entropy with optional L2 penalty on the weights (not the bias).
// Partition: [weights, bias].
class LogisticRegressionProblem : public Problem {
 public:
  LogisticRegressionProblem(Dataset data, real l2 = 0);

  std::size_t dim() const override { return data_.cols + 1; }
  const LayerPartition& partition() const override { return partition_; }
  bool convex() const override { return true; }
  bool classification() const override { return true; }
  std::size_t sample_count() const override { return data_.rows; }
  real loss(std::span<const real> theta,
            std::span<const std::size_t> batch = {}) const override;
  GradientSnapshot gradient(std::span<const real> theta,
                            std::span<const std::size_t> batch = {}) const override;
  real accuracy(std::span<const real> theta, const Dataset& data) const override;

  bool degenerate_single_class() const { return degenerate_; }
  const Dataset& dataset() const { return data_; }

 private:
  Dataset data_;
  real l2_ = 0;
  bool degenerate_ = false;
  LayerPartition partition_;
};

enum class Activation { tanh, relu };

Activation activation_from_string(const std::string& name);
const char* to_string(Activation a);

// Fully connected net with manual backprop and softmax cross-entropy loss.
// Partition: one entry per weight matrix and one per bias vector, in order
// W1, b1, W2, b2, ... The ReLU subgradient at 0 is 0.
class MlpProblem : public Problem {
 public:
  MlpProblem(std::vector<std::size_t> widths, Activation activation, Dataset data);

  std::size_t dim() const override { return partition_.dim(); }
  const LayerPartition& partition() const override { return partition_; }
  bool convex() const override { return false; }
  bool classification() const override { return true; }
  std::size_t sample_count() const override { return data_.rows; }
  real loss(std::span<const real> theta,
            std::span<const std::size_t> batch = {}) const override;
  GradientSnapshot gradient(std::span<const real> theta,
                            std::span<const std::size_t> batch = {}) const override;
  std::vector<real> initial_point(std::uint64_t seed) const override;
  real accuracy(std::span<const real> theta, const Dataset& data) const override;

  const Dataset& dataset() const { return data_; }
  const std::vector<std::size_t>& widths() const { return widths_; }

 private:
  // Forward pass for one sample; fills activations/preactivations per layer.
  void forward(std::span<const real> theta, std::span<const real> x,
               std::vector<std::vector<real>>& a,
               std::vector<std::vector<real>>& z) const;
  real sample_loss_and_backprop(std::span<const real> theta, std::size_t row,
                                std::span<real> grad_accum) const;

  std::vector<std::size_t> widths_;
  Activation activation_;
  Dataset data_;
  LayerPartition partition_;
};

// Scales theta to the L2 ball of the given radius when it lies outside.
void project_to_ball(std::span<real> theta, real radius);

}  // namespace setadam
