#include "setadam/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "setadam/rng.hpp"

namespace setadam {

std::vector<real> Problem::initial_point(std::uint64_t) const {
  return std::vector<real>(dim(), 0);
}

real Problem::accuracy(std::span<const real>, const Dataset&) const {
  throw std::logic_error("accuracy: not a classification problem");
}

// --- quadratic ---------------------------------------------------------------

namespace {

// Oracle-friendly ceiling: brute-force and finite-difference checks stay
// sub-second below this.
constexpr std::size_t kMaxProblemDim = 5000;

LayerPartition quadratic_partition(std::size_t d, bool coordinate_layers) {
  if (coordinate_layers) {
    return LayerPartition::from_sizes(std::vector<std::size_t>(d, 1));
  }
  return LayerPartition::from_sizes({d});
}

// Cholesky factorization in place; throws when the matrix is not SPD.
std::vector<real> cholesky(const std::vector<real>& a, std::size_t d) {
  std::vector<real> chol(a);
  for (std::size_t j = 0; j < d; ++j) {
    real diag = chol[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= chol[j * d + k] * chol[j * d + k];
    if (!(diag > 0)) {
      throw std::invalid_argument("QuadraticProblem: matrix is not SPD (Cholesky failed)");
    }
    chol[j * d + j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      real sum = chol[i * d + j];
      for (std::size_t k = 0; k < j; ++k) sum -= chol[i * d + k] * chol[j * d + k];
      chol[i * d + j] = sum / chol[j * d + j];
    }
  }
  return chol;
}

std::vector<real> cholesky_solve(const std::vector<real>& chol, std::size_t d,
                                 const std::vector<real>& b) {
  std::vector<real> y(b);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= chol[i * d + k] * y[k];
    y[i] /= chol[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    for (std::size_t k = i + 1; k < d; ++k) y[i] -= chol[k * d + i] * y[k];
    y[i] /= chol[i * d + i];
  }
  return y;
}

}  // namespace

QuadraticProblem::QuadraticProblem(std::vector<real> a_diag, std::vector<real> b,
                                   bool coordinate_layers)
    : a_diag_(std::move(a_diag)), b_(std::move(b)) {
  if (a_diag_.empty() || a_diag_.size() != b_.size()) {
    throw std::invalid_argument("QuadraticProblem: diagonal/b size mismatch");
  }
  if (b_.size() > kMaxProblemDim) {
    throw std::invalid_argument("QuadraticProblem: dimension above the 5000 cap");
  }
  for (real a : a_diag_) {
    if (!(a > 0)) {
      throw std::invalid_argument("QuadraticProblem: matrix is not SPD (Cholesky failed)");
    }
  }
  partition_ = quadratic_partition(b_.size(), coordinate_layers);
  optimum_.resize(b_.size());
  for (std::size_t i = 0; i < b_.size(); ++i) optimum_[i] = b_[i] / a_diag_[i];
  real fstar = 0;
  for (std::size_t i = 0; i < b_.size(); ++i) fstar += b_[i] * optimum_[i];
  optimum_value_ = -fstar / 2;
}

QuadraticProblem::QuadraticProblem(DenseMatrix a, std::vector<real> b,
                                   bool coordinate_layers)
    : b_(std::move(b)) {
  const std::size_t d = b_.size();
  if (d == 0 || a.values.size() != d * d) {
    throw std::invalid_argument("QuadraticProblem: dense matrix must be d x d");
  }
  if (d > 50) {
    throw std::invalid_argument("QuadraticProblem: dense instances capped at d = 50");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (a.values[i * d + j] != a.values[j * d + i]) {
        throw std::invalid_argument("QuadraticProblem: matrix is not symmetric");
      }
    }
  }
  dense_ = std::move(a.values);
  const std::vector<real> chol = cholesky(dense_, d);
  partition_ = quadratic_partition(d, coordinate_layers);
  optimum_ = cholesky_solve(chol, d, b_);
  real fstar = 0;
  for (std::size_t i = 0; i < d; ++i) fstar += b_[i] * optimum_[i];
  optimum_value_ = -fstar / 2;
}

void QuadraticProblem::multiply(std::span<const real> x, std::span<real> out) const {
  const std::size_t d = b_.size();
  if (dense_.empty()) {
    for (std::size_t i = 0; i < d; ++i) out[i] = a_diag_[i] * x[i];
    return;
  }
  for (std::size_t i = 0; i < d; ++i) {
    real sum = 0;
    for (std::size_t j = 0; j < d; ++j) sum += dense_[i * d + j] * x[j];
    out[i] = sum;
  }
}

real QuadraticProblem::loss(std::span<const real> theta,
                            std::span<const std::size_t>) const {
  if (theta.size() != b_.size()) {
    throw std::invalid_argument("QuadraticProblem: dimension mismatch");
  }
  std::vector<real> ax(b_.size());
  multiply(theta, ax);
  real value = 0;
  for (std::size_t i = 0; i < b_.size(); ++i) {
    value += theta[i] * ax[i] / 2 - b_[i] * theta[i];
  }
  return value;
}

GradientSnapshot QuadraticProblem::gradient(std::span<const real> theta,
                                            std::span<const std::size_t>) const {
  if (theta.size() != b_.size()) {
    throw std::invalid_argument("QuadraticProblem: dimension mismatch");
  }
  GradientSnapshot g;
  g.values.resize(b_.size());
  multiply(theta, g.values);
  for (std::size_t i = 0; i < b_.size(); ++i) g.values[i] -= b_[i];
  return g;
}

std::vector<real> QuadraticProblem::initial_point(std::uint64_t seed) const {
  CounterRng rng(seed, 17);
  std::vector<real> theta(b_.size());
  for (real& x : theta) x = 2 * static_cast<real>(rng.next_double()) - 1;
  return theta;
}

// --- logistic regression ------------------------------------------------------

LogisticRegressionProblem::LogisticRegressionProblem(Dataset data, real l2)
    : data_(std::move(data)), l2_(l2) {
  if (data_.rows == 0 || data_.cols == 0) {
    throw std::invalid_argument("LogisticRegressionProblem: empty dataset");
  }
  if (data_.cols + 1 > kMaxProblemDim) {
    throw std::invalid_argument(
        "LogisticRegressionProblem: dimension above the 5000 cap");
  }
  for (real y : data_.labels) {
    if (y != 0 && y != 1) {
      throw std::invalid_argument("LogisticRegressionProblem: labels must be 0/1");
    }
  }
  if (!(l2_ >= 0)) {
    throw std::invalid_argument("LogisticRegressionProblem: l2 must be >= 0");
  }
  degenerate_ = data_.single_class();
  partition_ = LayerPartition::from_sizes({data_.cols, 1});
}

namespace {

real logistic_sample_loss(real z, real y) {
  // log(1 + exp(z)) - y z, evaluated stably.
  return std::max(z, real(0)) - y * z + std::log1p(std::exp(-std::abs(z)));
}

real sigmoid(real z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  const real e = std::exp(z);
  return e / (1 + e);
}

}  // namespace

real LogisticRegressionProblem::loss(std::span<const real> theta,
                                     std::span<const std::size_t> batch) const {
  const std::size_t p = data_.cols;
  if (theta.size() != p + 1) {
    throw std::invalid_argument("LogisticRegressionProblem: dimension mismatch");
  }
  const real bias = theta[p];
  real total = 0;
  const std::size_t count = batch.empty() ? data_.rows : batch.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t r = batch.empty() ? k : batch[k];
    const std::span<const real> x = data_.row(r);
    real z = bias;
    for (std::size_t j = 0; j < p; ++j) z += theta[j] * x[j];
    total += logistic_sample_loss(z, data_.labels[r]);
  }
  real value = total / static_cast<real>(count);
  if (l2_ != 0) {
    real wsq = 0;
    for (std::size_t j = 0; j < p; ++j) wsq += theta[j] * theta[j];
    value += l2_ / 2 * wsq;
  }
  return value;
}

GradientSnapshot LogisticRegressionProblem::gradient(
    std::span<const real> theta, std::span<const std::size_t> batch) const {
  const std::size_t p = data_.cols;
  if (theta.size() != p + 1) {
    throw std::invalid_argument("LogisticRegressionProblem: dimension mismatch");
  }
  GradientSnapshot g;
  g.values.assign(p + 1, 0);
  const real bias = theta[p];
  const std::size_t count = batch.empty() ? data_.rows : batch.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t r = batch.empty() ? k : batch[k];
    const std::span<const real> x = data_.row(r);
    real z = bias;
    for (std::size_t j = 0; j < p; ++j) z += theta[j] * x[j];
    const real delta = sigmoid(z) - data_.labels[r];
    for (std::size_t j = 0; j < p; ++j) g.values[j] += delta * x[j];
    g.values[p] += delta;
  }
  for (real& v : g.values) v /= static_cast<real>(count);
  if (l2_ != 0) {
    for (std::size_t j = 0; j < p; ++j) g.values[j] += l2_ * theta[j];
  }
  return g;
}

real LogisticRegressionProblem::accuracy(std::span<const real> theta,
                                         const Dataset& data) const {
  const std::size_t p = data.cols;
  if (theta.size() != p + 1) {
    throw std::invalid_argument("LogisticRegressionProblem: dimension mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < data.rows; ++r) {
    const std::span<const real> x = data.row(r);
    real z = theta[p];
    for (std::size_t j = 0; j < p; ++j) z += theta[j] * x[j];
    const real predicted = z >= 0 ? 1 : 0;
    if (predicted == data.labels[r]) ++hits;
  }
  return static_cast<real>(hits) / static_cast<real>(data.rows);
}

// --- MLP -----------------------------------------------------------------------

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation: " + name);
}

const char* to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "relu";
}

MlpProblem::MlpProblem(std::vector<std::size_t> widths, Activation activation,
                       Dataset data)
    : widths_(std::move(widths)), activation_(activation), data_(std::move(data)) {
  if (widths_.size() < 2) {
    throw std::invalid_argument("MlpProblem: need at least input and output widths");
  }
  for (std::size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("MlpProblem: zero layer width");
  }
  if (data_.cols != widths_.front()) {
    throw std::invalid_argument("MlpProblem: dataset feature dimension " +
                                std::to_string(data_.cols) +
                                " does not match input width " +
                                std::to_string(widths_.front()));
  }
  const std::size_t classes = widths_.back();
  for (real y : data_.labels) {
    const real id = std::floor(y);
    if (id != y || y < 0 || static_cast<std::size_t>(id) >= classes) {
      throw std::invalid_argument("MlpProblem: labels must be class ids below " +
                                  std::to_string(classes));
    }
  }
  std::vector<std::size_t> sizes;
  for (std::size_t j = 0; j + 1 < widths_.size(); ++j) {
    sizes.push_back(widths_[j] * widths_[j + 1]);  // weight matrix
    sizes.push_back(widths_[j + 1]);               // bias vector
  }
  partition_ = LayerPartition::from_sizes(std::move(sizes));
  if (partition_.dim() > kMaxProblemDim) {
    throw std::invalid_argument("MlpProblem: dimension above the 5000 cap");
  }
}

void MlpProblem::forward(std::span<const real> theta, std::span<const real> x,
                         std::vector<std::vector<real>>& a,
                         std::vector<std::vector<real>>& z) const {
  const std::size_t layers = widths_.size() - 1;
  a.resize(layers + 1);
  z.resize(layers);
  a[0].assign(x.begin(), x.end());
  for (std::size_t j = 0; j < layers; ++j) {
    const std::size_t in = widths_[j];
    const std::size_t out = widths_[j + 1];
    const std::span<const real> w = partition_.view(theta, 2 * j);
    const std::span<const real> b = partition_.view(theta, 2 * j + 1);
    z[j].assign(b.begin(), b.end());
    for (std::size_t i = 0; i < in; ++i) {
      const real ai = a[j][i];
      if (ai == 0) continue;
      for (std::size_t o = 0; o < out; ++o) {
        z[j][o] += ai * w[i * out + o];
      }
    }
    if (j + 1 == layers) {
      a[j + 1] = z[j];  // linear output layer (logits)
    } else {
      a[j + 1].resize(out);
      for (std::size_t o = 0; o < out; ++o) {
        a[j + 1][o] = activation_ == Activation::tanh ? std::tanh(z[j][o])
                                                      : std::max(z[j][o], real(0));
      }
    }
  }
}

real MlpProblem::sample_loss_and_backprop(std::span<const real> theta,
                                          std::size_t row,
                                          std::span<real> grad_accum) const {
  std::vector<std::vector<real>> a, z;
  forward(theta, data_.row(row), a, z);
  const std::size_t layers = widths_.size() - 1;
  const std::vector<real>& logits = a[layers];
  const std::size_t y = static_cast<std::size_t>(data_.labels[row]);

  const real zmax = *std::max_element(logits.begin(), logits.end());
  real sum = 0;
  std::vector<real> delta(logits.size());
  for (std::size_t o = 0; o < logits.size(); ++o) {
    delta[o] = std::exp(logits[o] - zmax);
    sum += delta[o];
  }
  const real loss = std::log(sum) - (logits[y] - zmax);
  if (grad_accum.empty()) return loss;

  for (std::size_t o = 0; o < delta.size(); ++o) delta[o] /= sum;
  delta[y] -= 1;  // softmax cross-entropy backprop seed

  for (std::size_t j = layers; j-- > 0;) {
    const std::size_t in = widths_[j];
    const std::size_t out = widths_[j + 1];
    const std::span<real> dw = partition_.view(grad_accum, 2 * j);
    const std::span<real> db = partition_.view(grad_accum, 2 * j + 1);
    for (std::size_t o = 0; o < out; ++o) db[o] += delta[o];
    for (std::size_t i = 0; i < in; ++i) {
      const real ai = a[j][i];
      if (ai != 0) {
        for (std::size_t o = 0; o < out; ++o) dw[i * out + o] += ai * delta[o];
      }
    }
    if (j == 0) break;
    const std::span<const real> w = partition_.view(theta, 2 * j);
    std::vector<real> prev(in, 0);
    for (std::size_t i = 0; i < in; ++i) {
      real sum_w = 0;
      for (std::size_t o = 0; o < out; ++o) sum_w += w[i * out + o] * delta[o];
      const real zi = z[j - 1][i];
      const real slope = activation_ == Activation::tanh
                             ? 1 - std::tanh(zi) * std::tanh(zi)
                             : (zi > 0 ? real(1) : real(0));
      prev[i] = sum_w * slope;
    }
    delta = std::move(prev);
  }
  return loss;
}

real MlpProblem::loss(std::span<const real> theta,
                      std::span<const std::size_t> batch) const {
  if (theta.size() != partition_.dim()) {
    throw std::invalid_argument("MlpProblem: dimension mismatch");
  }
  const std::size_t count = batch.empty() ? data_.rows : batch.size();
  real total = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t r = batch.empty() ? k : batch[k];
    total += sample_loss_and_backprop(theta, r, {});
  }
  return total / static_cast<real>(count);
}

GradientSnapshot MlpProblem::gradient(std::span<const real> theta,
                                      std::span<const std::size_t> batch) const {
  if (theta.size() != partition_.dim()) {
    throw std::invalid_argument("MlpProblem: dimension mismatch");
  }
  GradientSnapshot g;
  g.values.assign(partition_.dim(), 0);
  const std::size_t count = batch.empty() ? data_.rows : batch.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t r = batch.empty() ? k : batch[k];
    sample_loss_and_backprop(theta, r, g.values);
  }
  for (real& v : g.values) v /= static_cast<real>(count);
  return g;
}

std::vector<real> MlpProblem::initial_point(std::uint64_t seed) const {
  std::vector<real> theta(partition_.dim(), 0);
  CounterRng rng(seed, 11);
  for (std::size_t j = 0; j + 1 < widths_.size(); ++j) {
    const std::size_t in = widths_[j];
    const std::size_t out = widths_[j + 1];
    const real limit = std::sqrt(real(6) / static_cast<real>(in + out));
    const std::span<real> w = partition_.view(std::span<real>(theta), 2 * j);
    for (real& x : w) {
      x = limit * (2 * static_cast<real>(rng.next_double()) - 1);
    }
    // biases stay zero
  }
  return theta;
}

real MlpProblem::accuracy(std::span<const real> theta, const Dataset& data) const {
  if (data.cols != widths_.front()) {
    throw std::invalid_argument("MlpProblem: dataset feature dimension mismatch");
  }
  std::size_t hits = 0;
  std::vector<std::vector<real>> a, z;
  for (std::size_t r = 0; r < data.rows; ++r) {
    forward(theta, data.row(r), a, z);
    const std::vector<real>& logits = a[widths_.size() - 1];
    const std::size_t pred =
        std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (pred == static_cast<std::size_t>(data.labels[r])) ++hits;
  }
  return static_cast<real>(hits) / static_cast<real>(data.rows);
}

// --- projection -----------------------------------------------------------------

void project_to_ball(std::span<real> theta, real radius) {
  if (!(radius > 0)) {
    throw std::invalid_argument("project_to_ball: radius must be > 0");
  }
  real sq = 0;
  for (real x : theta) sq += x * x;
  const real norm = std::sqrt(sq);
  if (norm <= radius) return;
  const real scale = radius / norm;
  for (real& x : theta) x *= scale;
}

}  // namespace setadam
