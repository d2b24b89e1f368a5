// SPDX-License-Identifier: Apache-2.0
//
// Scoring heads. The metric head turns two latent points into a weighted
// squared-Euclidean distance and maps it to an association probability;
// the inner-product head is the classic matrix-factorization baseline.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nmf {

// Per-dimension distance weights. Raw values are unconstrained trainables;
// the effective weights are softplus(raw) and therefore always positive,
// so the distance stays a valid (pseudo-)metric throughout training.
struct DistanceWeights {
  std::vector<double> raw;

  DistanceWeights() = default;
  explicit DistanceWeights(std::vector<double> raw_values)
      : raw(std::move(raw_values)) {}

  // Raw values whose effective weights equal the given targets (> 0).
  static DistanceWeights from_effective(std::span<const double> effective);
  // Raw values for exactly unit effective weights in every dimension,
  // i.e. plain squared Euclidean distance.
  static DistanceWeights unit(std::size_t dim);

  std::size_t dim() const { return raw.size(); }
  double effective_at(std::size_t t) const;
  std::vector<double> effective() const;
};

// E(d, s) = sum_t softplus(raw_t) * (d_t - s_t)^2. Symmetric in d and s,
// non-negative, and zero iff d == s (effective weights are positive).
double generalized_distance(std::span<const double> d,
                            std::span<const double> s,
                            const DistanceWeights& w);

// Probability link: smaller distance, higher probability. Maps E = 0 to
// exactly 0.5 and is strictly decreasing; equals sigmoid(-E).
double distance_to_probability(double E);

// Increasing variant kept only for side-by-side comparison; not used by
// any training or evaluation path.
double distance_to_probability_increasing(double E);

// sigmoid(<d, s>): the baseline head without any metric structure.
double inner_product_score(std::span<const double> d,
                           std::span<const double> s);

}  // namespace nmf
