// SPDX-License-Identifier: Apache-2.0

#include "nmf/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmf {

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix out(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c)
      throw std::invalid_argument("from_rows: ragged row lengths");
    std::copy(row.begin(), row.end(), out.data() + i * c);
    ++i;
  }
  return out;
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseMatrix::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

double RngStream::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_real(double lo, double hi) {
  return lo + (hi - lo) * uniform_double();
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  // Lemire multiply-shift; reject the low product to remove modulo bias.
  std::uint64_t range = n;
  std::uint64_t threshold = (-range) % range;
  for (;;) {
    unsigned __int128 prod =
        static_cast<unsigned __int128>(next_u64()) * range;
    if (static_cast<std::uint64_t>(prod) >= threshold)
      return static_cast<std::size_t>(prod >> 64);
  }
}

std::vector<double> affine(const DenseMatrix& W, std::span<const double> x,
                           std::span<const double> b) {
  if (W.cols() != x.size())
    throw std::invalid_argument("affine: W.cols != x.size");
  if (W.rows() != b.size())
    throw std::invalid_argument("affine: W.rows != b.size");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t r = 0; r < W.rows(); ++r) {
    const double* wr = W.data() + r * W.cols();
    double acc = 0.0;
    for (std::size_t c = 0; c < W.cols(); ++c) acc += wr[c] * x[c];
    y[r] += acc;
  }
  return y;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void sigmoid_inplace(std::span<double> xs) {
  for (double& x : xs) x = sigmoid(x);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double inverse_softplus(double y) {
  if (y <= 0.0)
    throw std::invalid_argument("inverse_softplus: argument must be > 0");
  // ln(e^y - 1); for large y the expm1 would overflow but y + ln(1-e^-y)
  // is exact enough and safe.
  if (y > 30.0) return y + std::log(-std::expm1(-y));
  return std::log(std::expm1(y));
}

void adam_step(ParamTensor& p, const AdamOptions& opts) {
  if (!(opts.learning_rate > 0.0) || !(opts.epsilon > 0.0) ||
      !(opts.beta1 >= 0.0 && opts.beta1 < 1.0) ||
      !(opts.beta2 >= 0.0 && opts.beta2 < 1.0))
    throw std::invalid_argument("adam_step: invalid hyperparameters");
  if (!p.grad.all_finite())
    throw std::runtime_error("adam_step: non-finite gradient");

  p.step_count += 1;
  double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(p.step_count));
  double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(p.step_count));
  double* val = p.value.data();
  const double* g = p.grad.data();
  double* m = p.m.data();
  double* v = p.v.data();
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    m[i] = opts.beta1 * m[i] + (1.0 - opts.beta1) * g[i];
    v[i] = opts.beta2 * v[i] + (1.0 - opts.beta2) * g[i] * g[i];
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    val[i] -= opts.learning_rate * mhat / (std::sqrt(vhat) + opts.epsilon);
  }
}

GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  std::span<ParamTensor* const> params,
                                  double h, std::size_t samples,
                                  RngStream& rng) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: h <= 0");
  std::size_t total = 0;
  for (const ParamTensor* p : params) total += p->value.size();
  if (total == 0)
    throw std::invalid_argument("finite_diff_check: no parameters");

  double base = loss_fn();
  if (!std::isfinite(base))
    throw std::runtime_error("finite_diff_check: non-finite loss");
  // Snapshot analytic gradients before perturbation runs overwrite them.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const ParamTensor* p : params)
    analytic.emplace_back(p->grad.data(), p->grad.data() + p->grad.size());

  GradCheckReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t flat = rng.uniform_index(total);
    std::size_t pi = 0;
    while (flat >= params[pi]->value.size()) {
      flat -= params[pi]->value.size();
      ++pi;
    }
    double* slot = params[pi]->value.data() + flat;
    double saved = *slot;
    *slot = saved + h;
    double plus = loss_fn();
    *slot = saved - h;
    double minus = loss_fn();
    *slot = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw std::runtime_error("finite_diff_check: non-finite loss");
    double numeric = (plus - minus) / (2.0 * h);
    double a = analytic[pi][flat];
    double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
    double rel = std::fabs(a - numeric) / denom;
    report.max_rel_error = std::max(report.max_rel_error, rel);
    ++report.coords_checked;
  }
  // Restore gradient state to the unperturbed point for callers that keep
  // using these tensors.
  loss_fn();
  return report;
}

}  // namespace nmf
