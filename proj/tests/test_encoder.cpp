// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nmf/encoder.hpp"
#include "nmf/numkit.hpp"
#include "test_support.hpp"

namespace nmf {
namespace {

// Decoder-neutral fixture: with zero decoder weights every reconstruction
// is sigmoid(0) = 0.5, so profiles of 0.5 make the reconstruction term
// vanish and the side loss reduces to the neighbor pull alone.
struct PullOnlyFixture {
  EncoderParams params;
  DenseMatrix profiles;
  LatentTable latents;
  NeighborSet neighbors;

  PullOnlyFixture(std::size_t n_items, std::size_t latent_dim,
                  std::size_t profile_dim)
      : params(latent_dim, profile_dim),
        profiles(n_items, profile_dim, 0.5),
        latents(n_items, latent_dim) {
    neighbors.lists.resize(n_items);
  }
};

TEST(EncoderParams, InitShapesAndBounds) {
  EncoderParams p(3, 7);
  EXPECT_EQ(p.latent_dim(), 3u);
  EXPECT_EQ(p.profile_dim(), 7u);
  EXPECT_EQ(p.weight_enc.rows(), 3u);
  EXPECT_EQ(p.weight_enc.cols(), 7u);
  EXPECT_EQ(p.bias_enc.rows(), 3u);
  EXPECT_EQ(p.weight_dec.rows(), 7u);
  EXPECT_EQ(p.weight_dec.cols(), 3u);
  EXPECT_EQ(p.bias_dec.rows(), 7u);

  RngStream rng(5);
  p.init(rng);
  double enc_bound = 1.0 / std::sqrt(7.0);
  double dec_bound = 1.0 / std::sqrt(3.0);
  for (std::size_t i = 0; i < p.weight_enc.value.size(); ++i)
    EXPECT_LE(std::abs(p.weight_enc.value.data()[i]), enc_bound);
  for (std::size_t i = 0; i < p.weight_dec.value.size(); ++i)
    EXPECT_LE(std::abs(p.weight_dec.value.data()[i]), dec_bound);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_DOUBLE_EQ(p.bias_enc.value(i, 0), 0.0);
  for (std::size_t i = 0; i < 7; ++i)
    EXPECT_DOUBLE_EQ(p.bias_dec.value(i, 0), 0.0);

  EncoderParams q(3, 7);
  RngStream rng2(5);
  q.init(rng2);
  EXPECT_EQ(q.weight_enc.value, p.weight_enc.value);
  EXPECT_EQ(q.weight_dec.value, p.weight_dec.value);
}

TEST(Encode, MatchesHandComputedExample) {
  EncoderParams p(2, 3);
  p.weight_enc.value = DenseMatrix::from_rows({{1.0, -1.0, 0.5},
                                               {0.0, 2.0, -1.0}});
  p.bias_enc.value = DenseMatrix::from_rows({{0.1}, {-0.2}});
  std::vector<double> profile = {1.0, 0.0, 1.0};
  std::vector<double> z = encode(profile, p);
  ASSERT_EQ(z.size(), 2u);
  // pre-activations 1.6 and -1.2.
  EXPECT_NEAR(z[0], 0.8320183851339245, 1e-12);
  EXPECT_NEAR(z[1], 0.23147521650098238, 1e-12);
}

TEST(Encode, SparsePathEqualsDenseAffine) {
  RngStream rng(21);
  EncoderParams p(4, 9);
  p.init(rng);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> profile(9, 0.0);
    for (auto& v : profile) v = rng.uniform_double() < 0.3 ? 1.0 : 0.0;
    std::vector<double> bias(4);
    for (std::size_t i = 0; i < 4; ++i) bias[i] = p.bias_enc.value(i, 0);
    std::vector<double> pre = affine(p.weight_enc.value, profile, bias);
    sigmoid_inplace(pre);
    std::vector<double> z = encode(profile, p);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(z[i], pre[i], 1e-15);
  }
}

TEST(Decode, MatchesAffinePlusSigmoid) {
  RngStream rng(22);
  EncoderParams p(3, 5);
  p.init(rng);
  std::vector<double> point = {0.2, 0.7, 0.4};
  std::vector<double> bias(5);
  for (std::size_t i = 0; i < 5; ++i) bias[i] = p.bias_dec.value(i, 0);
  std::vector<double> pre = affine(p.weight_dec.value, point, bias);
  sigmoid_inplace(pre);
  std::vector<double> recon = decode(point, p);
  ASSERT_EQ(recon.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(recon[i], pre[i], 1e-15);
}

TEST(LookupLatent, ReturnsRowsAndChecksBounds) {
  DenseMatrix table = DenseMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
  auto row = lookup_latent(table, 1);
  ASSERT_EQ(row.size(), 2u);
  EXPECT_DOUBLE_EQ(row[0], 3.0);
  EXPECT_THROW(lookup_latent(table, 2), std::out_of_range);
}

TEST(NeighborSet, TopKBySimilarityTiesToLowerIndex) {
  SimilarityMatrix sim;
  sim.ids = {"a", "b", "c", "d"};
  sim.values = DenseMatrix::from_rows({{1.0, 0.9, 0.3, 0.9},
                                       {0.9, 1.0, 0.5, 0.1},
                                       {0.3, 0.5, 1.0, 0.2},
                                       {0.9, 0.1, 0.2, 1.0}});
  NeighborSet ns = NeighborSet::from_similarity(sim, 2);
  ASSERT_EQ(ns.size(), 4u);
  // Row a: b and d tie at 0.9; lower index (b = 1) comes first.
  auto a = ns.neighbors(0);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].index, 1u);
  EXPECT_DOUBLE_EQ(a[0].weight, 0.9);
  EXPECT_EQ(a[1].index, 3u);
  EXPECT_DOUBLE_EQ(a[1].weight, 0.9);
  // Self is never a neighbor.
  for (std::size_t i = 0; i < 4; ++i)
    for (const Neighbor& nb : ns.neighbors(i)) EXPECT_NE(nb.index, i);
}

TEST(NeighborSet, KZeroKeepsAllAndNormalizeSumsToOne) {
  SimilarityMatrix sim;
  sim.ids = {"a", "b", "c"};
  sim.values = DenseMatrix::from_rows(
      {{1.0, 0.4, 0.6}, {0.4, 1.0, 0.8}, {0.6, 0.8, 1.0}});
  NeighborSet all = NeighborSet::from_similarity(sim, 0);
  EXPECT_EQ(all.neighbors(0).size(), 2u);
  NeighborSet norm = NeighborSet::from_similarity(sim, 0, true);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (const Neighbor& nb : norm.neighbors(i)) sum += nb.weight;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  // Relative order is preserved under normalization.
  EXPECT_EQ(norm.neighbors(0)[0].index, all.neighbors(0)[0].index);
}

TEST(SideLoss, PullTermMatchesHandComputedExample) {
  PullOnlyFixture fx(2, 2, 2);
  fx.latents.points = DenseMatrix::from_rows({{0.0, 0.0}, {1.0, 1.0}});
  fx.neighbors.lists[0] = {{1, 0.5}};
  std::vector<std::size_t> batch = {0};
  // recon term 0; pull = 0.5 * ((0-1)^2 + (0-1)^2) = 1.
  EXPECT_DOUBLE_EQ(
      side_loss(fx.profiles, batch, fx.params, fx.latents, fx.neighbors),
      1.0);
}

TEST(SideLoss, MeanReductionOverTheBatch) {
  PullOnlyFixture fx(2, 2, 2);
  fx.latents.points = DenseMatrix::from_rows({{0.0, 0.0}, {1.0, 1.0}});
  fx.neighbors.lists[0] = {{1, 0.5}};
  fx.neighbors.lists[1] = {{0, 0.25}};
  std::vector<std::size_t> batch = {0, 1};
  // item 0 contributes 1.0, item 1 contributes 0.5; mean = 0.75.
  EXPECT_DOUBLE_EQ(
      side_loss(fx.profiles, batch, fx.params, fx.latents, fx.neighbors),
      0.75);
}

TEST(SideLoss, MatchesIndependentRecomputation) {
  RngStream rng(33);
  const std::size_t n = 5, k = 3, pdim = 6;
  EncoderParams params(k, pdim);
  params.init(rng);
  DenseMatrix profiles(n, pdim);
  for (std::size_t i = 0; i < profiles.size(); ++i)
    profiles.data()[i] = rng.uniform_double() < 0.4 ? 1.0 : 0.0;
  LatentTable latents(n, k);
  for (std::size_t i = 0; i < latents.points.size(); ++i)
    latents.points.data()[i] = rng.uniform_double();
  NeighborSet neighbors;
  neighbors.lists.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.uniform_double() < 0.5)
        neighbors.lists[i].push_back({j, rng.uniform_double()});

  std::vector<std::size_t> batch = {0, 2, 4};
  double expect = 0.0;
  for (std::size_t i : batch) {
    std::vector<double> point(latents.points.row(i).begin(),
                              latents.points.row(i).end());
    std::vector<double> recon = decode(point, params);
    double term = 0.0;
    for (std::size_t t = 0; t < pdim; ++t) {
      double diff = recon[t] - profiles(i, t);
      term += diff * diff;
    }
    for (const Neighbor& nb : neighbors.lists[i]) {
      for (std::size_t t = 0; t < k; ++t) {
        double diff = latents.points(i, t) - latents.points(nb.index, t);
        term += nb.weight * diff * diff;
      }
    }
    expect += term;
  }
  expect /= static_cast<double>(batch.size());
  EXPECT_NEAR(side_loss(profiles, batch, params, latents, neighbors),
              expect, 1e-12);
}

TEST(SideLossBackward, ReturnsUnscaledLossAndScalesGradients) {
  RngStream rng(44);
  const std::size_t n = 4, k = 2, pdim = 5;
  EncoderParams p1(k, pdim), p2(k, pdim);
  p1.init(rng);
  p2.weight_enc.value = p1.weight_enc.value;
  p2.bias_enc.value = p1.bias_enc.value;
  p2.weight_dec.value = p1.weight_dec.value;
  p2.bias_dec.value = p1.bias_dec.value;
  DenseMatrix profiles(n, pdim);
  for (std::size_t i = 0; i < profiles.size(); ++i)
    profiles.data()[i] = rng.uniform_double() < 0.5 ? 1.0 : 0.0;
  LatentTable latents(n, k);
  for (std::size_t i = 0; i < latents.points.size(); ++i)
    latents.points.data()[i] = rng.uniform_double();
  NeighborSet neighbors;
  neighbors.lists.resize(n);
  neighbors.lists[0] = {{1, 0.8}};
  neighbors.lists[2] = {{3, 0.6}, {0, 0.3}};
  std::vector<std::size_t> batch = {0, 2};

  DenseMatrix g1(n, k), g2(n, k);
  double l1 = side_loss_backward(profiles, batch, p1, latents, neighbors,
                                 1.0, g1);
  double l2 = side_loss_backward(profiles, batch, p2, latents, neighbors,
                                 2.5, g2);
  EXPECT_DOUBLE_EQ(l1, l2);  // returned loss is unscaled
  EXPECT_DOUBLE_EQ(
      l1, side_loss(profiles, batch, p1, latents, neighbors));
  for (std::size_t i = 0; i < g1.size(); ++i)
    EXPECT_NEAR(g2.data()[i], 2.5 * g1.data()[i], 1e-12);
  for (std::size_t i = 0; i < p1.weight_dec.grad.size(); ++i)
    EXPECT_NEAR(p2.weight_dec.grad.data()[i],
                2.5 * p1.weight_dec.grad.data()[i], 1e-12);
}

TEST(SideLossBackward, DecoderGradientsMatchFiniteDifferences) {
  RngStream rng(55);
  const std::size_t n = 4, k = 3, pdim = 5;
  EncoderParams params(k, pdim);
  params.init(rng);
  DenseMatrix profiles(n, pdim);
  for (std::size_t i = 0; i < profiles.size(); ++i)
    profiles.data()[i] = rng.uniform_double() < 0.5 ? 1.0 : 0.0;
  LatentTable latents(n, k);
  for (std::size_t i = 0; i < latents.points.size(); ++i)
    latents.points.data()[i] = rng.uniform_double();
  NeighborSet neighbors;
  neighbors.lists.resize(n);
  neighbors.lists[0] = {{1, 0.9}};
  neighbors.lists[1] = {{2, 0.4}};
  neighbors.lists[3] = {{0, 0.7}};
  std::vector<std::size_t> batch = {0, 1, 3};

  DenseMatrix latent_grad(n, k);
  auto loss_fn = [&]() {
    params.weight_dec.zero_grad();
    params.bias_dec.zero_grad();
    latent_grad.fill(0.0);
    return side_loss_backward(profiles, batch, params, latents, neighbors,
                              1.0, latent_grad);
  };
  std::vector<ParamTensor*> tensors = {&params.weight_dec,
                                       &params.bias_dec};
  RngStream check_rng(7);
  GradCheckReport report =
      finite_diff_check(loss_fn, tensors, 1e-5, 40, check_rng);
  EXPECT_LE(report.max_rel_error, 1e-6);

  // Latent gradients against manual central differences.
  loss_fn();
  DenseMatrix analytic = latent_grad;
  for (std::size_t idx : {std::size_t{0}, std::size_t{3}, std::size_t{7}}) {
    double saved = latents.points.data()[idx];
    const double h = 1e-5;
    latents.points.data()[idx] = saved + h;
    double up = side_loss(profiles, batch, params, latents, neighbors);
    latents.points.data()[idx] = saved - h;
    double down = side_loss(profiles, batch, params, latents, neighbors);
    latents.points.data()[idx] = saved;
    double numeric = (up - down) / (2.0 * h);
    EXPECT_NEAR(analytic.data()[idx], numeric,
                1e-6 * std::max(1.0, std::abs(numeric)));
  }
}

TEST(SideLossBackward, OneDescentStepShrinksTheNeighborGap) {
  // The pull term's whole point: similar entities drift together.
  RngStream rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    PullOnlyFixture fx(2, 3, 4);
    for (std::size_t i = 0; i < fx.latents.points.size(); ++i)
      fx.latents.points.data()[i] = rng.uniform_real(-1.0, 1.0);
    double w = rng.uniform_real(0.1, 1.0);
    fx.neighbors.lists[0] = {{1, w}};
    fx.neighbors.lists[1] = {{0, w}};
    std::vector<std::size_t> batch = {0, 1};

    auto gap = [&]() {
      double g = 0.0;
      for (std::size_t t = 0; t < 3; ++t) {
        double diff = fx.latents.points(0, t) - fx.latents.points(1, t);
        g += diff * diff;
      }
      return g;
    };
    double before = gap();
    if (before == 0.0) continue;
    DenseMatrix latent_grad(2, 3);
    side_loss_backward(fx.profiles, batch, fx.params, fx.latents,
                       fx.neighbors, 1.0, latent_grad);
    const double eta = 0.01;
    for (std::size_t i = 0; i < fx.latents.points.size(); ++i)
      fx.latents.points.data()[i] -= eta * latent_grad.data()[i];
    EXPECT_LT(gap(), before);
  }
}

TEST(EncodeBackward, MatchesFiniteDifferences) {
  RngStream rng(77);
  EncoderParams params(3, 6);
  params.init(rng);
  std::vector<double> profile = {1.0, 0.0, 1.0, 1.0, 0.0, 1.0};
  std::vector<double> c = {0.7, -1.3, 0.4};  // fixed cotangent

  auto loss_fn = [&]() {
    params.weight_enc.zero_grad();
    params.bias_enc.zero_grad();
    std::vector<double> z = encode(profile, params);
    double loss = 0.0;
    for (std::size_t t = 0; t < 3; ++t) loss += c[t] * z[t];
    encode_backward(profile, params, z, c);
    return loss;
  };
  std::vector<ParamTensor*> tensors = {&params.weight_enc,
                                       &params.bias_enc};
  RngStream check_rng(8);
  GradCheckReport report =
      finite_diff_check(loss_fn, tensors, 1e-5, 40, check_rng);
  EXPECT_LE(report.max_rel_error, 1e-6);
}

TEST(EncodeBackward, ZeroProfileColumnsGetNoEncoderGradient) {
  EncoderParams params(2, 4);
  RngStream rng(88);
  params.init(rng);
  std::vector<double> profile = {1.0, 0.0, 1.0, 0.0};
  std::vector<double> z = encode(profile, params);
  std::vector<double> g = {1.0, 1.0};
  params.weight_enc.zero_grad();
  params.bias_enc.zero_grad();
  encode_backward(profile, params, z, g);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_DOUBLE_EQ(params.weight_enc.grad(r, 1), 0.0);
    EXPECT_DOUBLE_EQ(params.weight_enc.grad(r, 3), 0.0);
    EXPECT_NE(params.weight_enc.grad(r, 0), 0.0);
    EXPECT_NE(params.bias_enc.grad(r, 0), 0.0);
  }
}

}  // namespace
}  // namespace nmf
