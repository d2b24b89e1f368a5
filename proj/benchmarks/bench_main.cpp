// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: the distance head, profile encoding,
// rank metrics at evaluation scale, and one full training minibatch.

#include <vector>

#include <benchmark/benchmark.h>

#include "nmf/dataset.hpp"
#include "nmf/encoder.hpp"
#include "nmf/evaluator.hpp"
#include "nmf/numkit.hpp"
#include "nmf/scorer.hpp"
#include "nmf/trainer.hpp"

namespace {

using namespace nmf;

void BM_GeneralizedDistance(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  RngStream rng(1);
  std::vector<double> d(dim), s(dim);
  for (auto& v : d) v = rng.uniform_double();
  for (auto& v : s) v = rng.uniform_double();
  DistanceWeights w = DistanceWeights::unit(dim);
  for (auto _ : state)
    benchmark::DoNotOptimize(generalized_distance(d, s, w));
}
BENCHMARK(BM_GeneralizedDistance)->Arg(8)->Arg(32)->Arg(128);

void BM_EncodeSparseProfile(benchmark::State& state) {
  // Profile sized like one reference-dataset disease axis, ~3% filled.
  const std::size_t profile_dim = 593, latent_dim = 32;
  RngStream rng(2);
  EncoderParams params(latent_dim, profile_dim);
  params.init(rng);
  std::vector<double> profile(profile_dim, 0.0);
  for (auto& v : profile) v = rng.uniform_double() < 0.03 ? 1.0 : 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(encode(profile, params));
}
BENCHMARK(BM_EncodeSparseProfile);

void BM_AucAtEvaluationScale(benchmark::State& state) {
  // ~184k scored pairs, the full-matrix evaluation size.
  RngStream rng(3);
  ScoredPairs sp;
  for (std::size_t i = 0; i < 184256; ++i)
    sp.pairs.push_back(
        {i / 313, i % 313, rng.uniform_double(), i % 317 == 0 ? 1.0 : 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(auc(sp));
}
BENCHMARK(BM_AucAtEvaluationScale)->Unit(benchmark::kMillisecond);

void BM_TrainingMinibatch(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_drugs = 200;
  spec.n_diseases = 150;
  spec.latent_dim = 8;
  spec.density = 0.05;
  spec.seed = 4;
  SyntheticData data = generate_synthetic(spec);
  DataSplit split = split_associations(data.bundle.associations, 0.7, 1);
  TrainConfig cfg;
  cfg.variant = Variant::nmf;
  TrainContext ctx = make_train_context(data.bundle, split, cfg);
  ModelState model = ModelState::init(cfg, 200, 150);

  std::vector<BatchPair> batch;
  for (std::size_t i = 0; i < std::min<std::size_t>(
                              cfg.batch_size,
                              split.train_positives.size());
       ++i)
    batch.push_back({split.train_positives[i].first,
                     split.train_positives[i].second, 1.0});
  NegativeBatch negs = sample_negatives(
      ctx.train_assoc, cfg.negatives_per_positive, batch.size(), 9, 0);
  for (const Cell& c : negs.cells)
    batch.push_back({c.first, c.second, 0.0});

  for (auto _ : state)
    benchmark::DoNotOptimize(total_loss_backward(ctx, model, batch).total);
}
BENCHMARK(BM_TrainingMinibatch)->Unit(benchmark::kMillisecond);

void BM_AdamStepLargeTensor(benchmark::State& state) {
  ParamTensor p(593, 32);
  p.grad.fill(0.001);
  AdamOptions opts;
  for (auto _ : state) adam_step(p, opts);
}
BENCHMARK(BM_AdamStepLargeTensor);

}  // namespace
