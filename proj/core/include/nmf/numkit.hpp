// SPDX-License-Identifier: Apache-2.0
//
// Small numeric kernel: dense row-major matrices, Adam-ready parameter
// tensors, a cross-platform deterministic RNG, and a finite-difference
// gradient checker. Everything downstream builds on these primitives.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace nmf {

// Row-major dense matrix of doubles. Row r occupies the contiguous range
// [r*cols, (r+1)*cols) of the backing store, so row views are cheap spans.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v);
  bool all_finite() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// A trainable tensor: value plus gradient plus Adam first/second moment
// accumulators, all shape-locked to each other. step_count is the number
// of adam_step() calls applied so far (drives bias correction).
struct ParamTensor {
  DenseMatrix value;
  DenseMatrix grad;
  DenseMatrix m;
  DenseMatrix v;
  std::uint64_t step_count = 0;

  ParamTensor() = default;
  ParamTensor(std::size_t rows, std::size_t cols)
      : value(rows, cols), grad(rows, cols), m(rows, cols), v(rows, cols) {}

  std::size_t rows() const { return value.rows(); }
  std::size_t cols() const { return value.cols(); }
  void zero_grad() { grad.fill(0.0); }
};

// Deterministic RNG with identical output on every platform. The raw
// stream is std::mt19937_64, whose outputs the standard pins exactly; the
// mappings below are hand-rolled because the standard library's
// distributions are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1): top 53 bits of the raw draw scaled by 2^-53.
  double uniform_double();
  // Uniform on [lo,hi).
  double uniform_real(double lo, double hi);
  // Unbiased integer in [0,n) via multiply-shift with rejection.
  std::size_t uniform_index(std::size_t n);

  // Fisher-Yates. Consumes exactly size()-1 uniform_index draws for
  // size() >= 2 and nothing otherwise.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      std::size_t j = uniform_index(i + 1);
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// y = W x + b. Shapes: W is m x n, x has n entries, b has m.
std::vector<double> affine(const DenseMatrix& W, std::span<const double> x,
                           std::span<const double> b);

// Numerically stable logistic; never overflows for |x| <= 700 and stays
// strictly inside (0,1) there.
double sigmoid(double x);
void sigmoid_inplace(std::span<double> xs);

// softplus(x) = ln(1 + e^x) and its inverse, both overflow-safe.
double softplus(double x);
double inverse_softplus(double y);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of p.value from p.grad. Leaves the
// gradient untouched so callers can inspect it after the step. Throws on
// non-finite gradients or nonsensical hyperparameters.
void adam_step(ParamTensor& p, const AdamOptions& opts);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
};

// Central-difference audit of analytic gradients. loss_fn must (re)compute
// the loss AND populate every param's grad field on each call; values are
// perturbed in place and restored. Coordinates are sampled uniformly with
// replacement across all tensors. Relative error uses
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  std::span<ParamTensor* const> params,
                                  double h, std::size_t samples,
                                  RngStream& rng);

}  // namespace nmf
