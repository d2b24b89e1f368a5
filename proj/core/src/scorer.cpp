// SPDX-License-Identifier: Apache-2.0

#include "nmf/scorer.hpp"

#include <stdexcept>

#include "nmf/numkit.hpp"

namespace nmf {

DistanceWeights DistanceWeights::from_effective(
    std::span<const double> effective) {
  std::vector<double> raw(effective.size());
  for (std::size_t t = 0; t < effective.size(); ++t)
    raw[t] = inverse_softplus(effective[t]);
  return DistanceWeights(std::move(raw));
}

DistanceWeights DistanceWeights::unit(std::size_t dim) {
  return DistanceWeights(
      std::vector<double>(dim, inverse_softplus(1.0)));
}

double DistanceWeights::effective_at(std::size_t t) const {
  return softplus(raw[t]);
}

std::vector<double> DistanceWeights::effective() const {
  std::vector<double> eff(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) eff[t] = softplus(raw[t]);
  return eff;
}

double generalized_distance(std::span<const double> d,
                            std::span<const double> s,
                            const DistanceWeights& w) {
  if (d.size() != s.size() || d.size() != w.dim())
    throw std::invalid_argument("generalized_distance: dimension mismatch");
  double acc = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    double diff = d[t] - s[t];
    acc += softplus(w.raw[t]) * diff * diff;
  }
  return acc;
}

double distance_to_probability(double E) { return sigmoid(-E); }

double distance_to_probability_increasing(double E) { return sigmoid(E); }

double inner_product_score(std::span<const double> d,
                           std::span<const double> s) {
  if (d.size() != s.size())
    throw std::invalid_argument("inner_product_score: dimension mismatch");
  double dot = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) dot += d[t] * s[t];
  return sigmoid(dot);
}

}  // namespace nmf
