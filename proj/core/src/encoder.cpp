// SPDX-License-Identifier: Apache-2.0

#include "nmf/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nmf {

void EncoderParams::init(RngStream& rng) {
  double enc_bound = 1.0 / std::sqrt(static_cast<double>(profile_dim()));
  for (std::size_t i = 0; i < weight_enc.value.size(); ++i)
    weight_enc.value.data()[i] = rng.uniform_real(-enc_bound, enc_bound);
  double dec_bound = 1.0 / std::sqrt(static_cast<double>(latent_dim()));
  for (std::size_t i = 0; i < weight_dec.value.size(); ++i)
    weight_dec.value.data()[i] = rng.uniform_real(-dec_bound, dec_bound);
  bias_enc.value.fill(0.0);
  bias_dec.value.fill(0.0);
}

std::span<const double> lookup_latent(const DenseMatrix& table,
                                      std::size_t index) {
  if (index >= table.rows())
    throw std::out_of_range("lookup_latent: row out of range");
  return table.row(index);
}

NeighborSet NeighborSet::from_similarity(const SimilarityMatrix& sim,
                                         std::size_t k, bool normalize) {
  NeighborSet set;
  std::size_t n = sim.size();
  set.lists.resize(n);
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < n; ++i) {
    all.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) all.push_back({j, sim.values(i, j)});
    std::stable_sort(all.begin(), all.end(),
                     [](const Neighbor& a, const Neighbor& b) {
                       if (a.weight != b.weight) return a.weight > b.weight;
                       return a.index < b.index;
                     });
    std::size_t keep = (k == 0) ? all.size() : std::min(k, all.size());
    set.lists[i].assign(all.begin(), all.begin() + keep);
    if (normalize) {
      double sum = 0.0;
      for (const Neighbor& nb : set.lists[i]) sum += nb.weight;
      if (sum > 0.0)
        for (Neighbor& nb : set.lists[i]) nb.weight /= sum;
    }
  }
  return set;
}

std::vector<double> encode(std::span<const double> profile,
                           const EncoderParams& params) {
  if (profile.size() != params.profile_dim())
    throw std::invalid_argument("encode: profile length mismatch");
  std::size_t k = params.latent_dim();
  std::size_t n = params.profile_dim();
  std::vector<double> z(params.bias_enc.value.data(),
                        params.bias_enc.value.data() + k);
  const double* W = params.weight_enc.value.data();
  for (std::size_t q = 0; q < n; ++q) {
    double p = profile[q];
    if (p == 0.0) continue;
    for (std::size_t t = 0; t < k; ++t) z[t] += W[t * n + q] * p;
  }
  sigmoid_inplace(z);
  return z;
}

std::vector<double> decode(std::span<const double> point,
                           const EncoderParams& params) {
  if (point.size() != params.latent_dim())
    throw std::invalid_argument("decode: point length mismatch");
  std::vector<double> u =
      affine(params.weight_dec.value, point,
             {params.bias_dec.value.data(), params.bias_dec.value.size()});
  sigmoid_inplace(u);
  return u;
}

namespace {

// Shared forward/backward walk; grads == nullptr -> forward only.
double side_loss_impl(const DenseMatrix& profiles,
                      std::span<const std::size_t> batch,
                      const EncoderParams& params, const LatentTable& latents,
                      const NeighborSet& neighbors, double scale,
                      EncoderParams* grads_into, DenseMatrix* latent_grad) {
  if (batch.empty()) return 0.0;
  if (latents.dim() != params.latent_dim())
    throw std::invalid_argument("side_loss: latent dimension mismatch");
  if (profiles.cols() != params.profile_dim())
    throw std::invalid_argument("side_loss: profile length mismatch");
  if (neighbors.size() != latents.size())
    throw std::invalid_argument("side_loss: neighbor set size mismatch");

  std::size_t k = params.latent_dim();
  std::size_t n = params.profile_dim();
  double f = scale / static_cast<double>(batch.size());
  double total = 0.0;
  const double* V = params.weight_dec.value.data();

  for (std::size_t i : batch) {
    std::span<const double> d = latents.points.row(i);
    std::span<const double> p = profiles.row(i);
    std::vector<double> recon = decode(d, params);

    double recon_loss = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      double e = recon[q] - p[q];
      recon_loss += e * e;
      if (grads_into != nullptr) {
        double delta = f * 2.0 * e * recon[q] * (1.0 - recon[q]);
        grads_into->bias_dec.grad(q, 0) += delta;
        double* wrow = grads_into->weight_dec.grad.data() + q * k;
        double* lg = latent_grad->data() + i * k;
        for (std::size_t t = 0; t < k; ++t) {
          wrow[t] += delta * d[t];
          lg[t] += delta * V[q * k + t];
        }
      }
    }

    double pull_loss = 0.0;
    for (const Neighbor& nb : neighbors.neighbors(i)) {
      std::span<const double> dk = latents.points.row(nb.index);
      double sq = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        double diff = d[t] - dk[t];
        sq += diff * diff;
        if (grads_into != nullptr) {
          double g = f * nb.weight * 2.0 * diff;
          (*latent_grad)(i, t) += g;
          (*latent_grad)(nb.index, t) -= g;
        }
      }
      pull_loss += nb.weight * sq;
    }
    total += recon_loss + pull_loss;
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace

double side_loss(const DenseMatrix& profiles,
                 std::span<const std::size_t> batch,
                 const EncoderParams& params, const LatentTable& latents,
                 const NeighborSet& neighbors) {
  return side_loss_impl(profiles, batch, params, latents, neighbors, 1.0,
                        nullptr, nullptr);
}

double side_loss_backward(const DenseMatrix& profiles,
                          std::span<const std::size_t> batch,
                          EncoderParams& params, const LatentTable& latents,
                          const NeighborSet& neighbors, double scale,
                          DenseMatrix& latent_grad) {
  if (latent_grad.rows() != latents.size() ||
      latent_grad.cols() != latents.dim())
    throw std::invalid_argument("side_loss_backward: latent_grad shape");
  return side_loss_impl(profiles, batch, params, latents, neighbors, scale,
                        &params, &latent_grad);
}

void encode_backward(std::span<const double> profile, EncoderParams& params,
                     std::span<const double> point,
                     std::span<const double> point_grad) {
  std::size_t k = params.latent_dim();
  std::size_t n = params.profile_dim();
  if (profile.size() != n || point.size() != k || point_grad.size() != k)
    throw std::invalid_argument("encode_backward: shape mismatch");
  double* Wg = params.weight_enc.grad.data();
  for (std::size_t t = 0; t < k; ++t) {
    double dz = point_grad[t] * point[t] * (1.0 - point[t]);
    if (dz == 0.0) continue;
    params.bias_enc.grad(t, 0) += dz;
    double* wrow = Wg + t * n;
    for (std::size_t q = 0; q < n; ++q)
      if (profile[q] != 0.0) wrow[q] += dz * profile[q];
  }
}

}  // namespace nmf
