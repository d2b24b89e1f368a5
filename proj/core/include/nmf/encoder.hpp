// SPDX-License-Identifier: Apache-2.0
//
// Similarity-regularized autoencoder. Each entity's binary association
// profile is encoded to a latent point; a decoder reconstructs the profile
// from the point; the side loss adds a pull term that drags the points of
// similar entities together. One instance serves the drug axis, another
// the disease axis.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nmf/dataset.hpp"
#include "nmf/numkit.hpp"

namespace nmf {

// Encoder/decoder parameter block. Shapes for latent dim k and profile
// length n: weight_enc k x n, bias_enc k x 1, weight_dec n x k,
// bias_dec n x 1.
struct EncoderParams {
  ParamTensor weight_enc;
  ParamTensor bias_enc;
  ParamTensor weight_dec;
  ParamTensor bias_dec;

  EncoderParams() = default;
  EncoderParams(std::size_t latent_dim, std::size_t profile_dim)
      : weight_enc(latent_dim, profile_dim),
        bias_enc(latent_dim, 1),
        weight_dec(profile_dim, latent_dim),
        bias_dec(profile_dim, 1) {}

  std::size_t latent_dim() const { return weight_enc.rows(); }
  std::size_t profile_dim() const { return weight_enc.cols(); }

  // Weights uniform in +-1/sqrt(fan_in), biases zero. Consumes RNG draws
  // in a fixed order (weight_enc row-major, then weight_dec row-major).
  void init(RngStream& rng);
};

// One latent point per entity, row-aligned with the entity axis.
struct LatentTable {
  DenseMatrix points;

  LatentTable() = default;
  LatentTable(std::size_t n, std::size_t dim) : points(n, dim) {}
  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
};

// Direct row lookup for the variants whose latent table is itself the
// trainable parameter (no encoder in front).
std::span<const double> lookup_latent(const DenseMatrix& table,
                                      std::size_t index);

struct Neighbor {
  std::size_t index;
  double weight;
};

// Per-entity neighbor lists drawn from a similarity matrix: the top-k
// other entities by similarity (k = 0 keeps all), self excluded, ties
// broken by lower index. Weights are the raw similarities unless
// normalize is set, in which case each list is scaled to sum to 1.
struct NeighborSet {
  std::vector<std::vector<Neighbor>> lists;

  static NeighborSet from_similarity(const SimilarityMatrix& sim,
                                     std::size_t k, bool normalize = false);

  std::size_t size() const { return lists.size(); }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return lists[i];
  }
};

// point = sigmoid(W_enc * profile + bias_enc). Skips zero profile entries,
// so cost scales with the number of known associations.
std::vector<double> encode(std::span<const double> profile,
                           const EncoderParams& params);

// reconstruction = sigmoid(weight_dec * point + bias_dec).
std::vector<double> decode(std::span<const double> point,
                           const EncoderParams& params);

// Mean over the batch of
//   ||decode(d_i) - profile_i||^2  +  sum_{k in N(i)} w_ik ||d_i - d_k||^2.
// Rows of `latents` must already hold the encoded points for every entity
// referenced by the batch or its neighbor lists.
double side_loss(const DenseMatrix& profiles,
                 std::span<const std::size_t> batch,
                 const EncoderParams& params, const LatentTable& latents,
                 const NeighborSet& neighbors);

// side_loss plus gradients: accumulates scale * d(loss)/d(theta) into the
// decoder tensors' grad fields and scale * d(loss)/d(latent) into
// latent_grad (same shape as latents.points). Returns the unscaled loss.
double side_loss_backward(const DenseMatrix& profiles,
                          std::span<const std::size_t> batch,
                          EncoderParams& params, const LatentTable& latents,
                          const NeighborSet& neighbors, double scale,
                          DenseMatrix& latent_grad);

// Chain rule through point = encode(profile): given dL/d(point),
// accumulates into weight_enc.grad and bias_enc.grad. `point` must be the
// encode() output for this profile.
void encode_backward(std::span<const double> profile, EncoderParams& params,
                     std::span<const double> point,
                     std::span<const double> point_grad);

}  // namespace nmf
