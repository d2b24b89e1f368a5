// SPDX-License-Identifier: Apache-2.0
//
// Joint training of latent points and the scoring head. Three variants
// share one loop:
//
//   nmf     encoder-produced points, weighted-distance head, similarity
//           side losses on both axes
//   nmf_oh  free per-entity latent tables, weighted-distance head, no
//           side losses
//   mf      free latent tables, inner-product head (baseline)
//
// Everything is deterministic given the config seed: parameter init, the
// per-epoch shuffle, and negative sampling each consume dedicated streams
// derived from it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nmf/dataset.hpp"
#include "nmf/encoder.hpp"
#include "nmf/numkit.hpp"
#include "nmf/scorer.hpp"

namespace nmf {

enum class Variant { nmf, nmf_oh, mf };

std::string_view to_string(Variant v);
// Accepts "nmf", "nmf_oh" / "nmf-oh", "mf".
Variant variant_from_string(std::string_view s);

struct TrainConfig {
  std::size_t latent_dim = 32;
  double learning_rate = 0.01;
  double alpha = 0.02;  // drug side-loss weight
  double beta = 0.02;   // disease side-loss weight
  std::size_t epochs = 200;
  std::size_t negatives_per_positive = 5;
  std::size_t neighbor_k = 10;  // 0 keeps every neighbor
  std::uint64_t seed = 13;
  Variant variant = Variant::nmf;
  std::size_t batch_size = 128;
  double split_ratio = 0.7;

  void validate() const;
};

// Canonical flat-JSON round trip for config files and checkpoints.
// Parsing merges onto `base`, so partial files override only the keys
// they mention; unknown keys are an error.
std::string train_config_json(const TrainConfig& cfg);
TrainConfig parse_train_config_json(std::string_view text,
                                    const TrainConfig& base);

// Exactly the parameter set of one variant; the unused optionals stay
// empty and load/save reject any mismatch.
struct ModelState {
  Variant variant = Variant::nmf;
  std::size_t latent_dim = 0;
  std::size_t n_drugs = 0;
  std::size_t n_diseases = 0;

  std::optional<EncoderParams> drug_encoder;     // nmf
  std::optional<EncoderParams> disease_encoder;  // nmf
  std::optional<ParamTensor> drug_table;         // nmf_oh, mf
  std::optional<ParamTensor> disease_table;      // nmf_oh, mf
  std::optional<ParamTensor> distance_raw;       // nmf, nmf_oh; k x 1

  // Zero-valued parameter shells with the right shapes for the variant.
  static ModelState with_shapes(Variant variant, std::size_t latent_dim,
                                std::size_t n_drugs, std::size_t n_diseases);

  // Fresh state with the variant's parameters initialized from
  // RngStream(cfg.seed): encoders/tables in declaration order, distance
  // weights at softplus(raw) = 1 so training starts from plain squared
  // Euclidean distance.
  static ModelState init(const TrainConfig& cfg, std::size_t n_drugs,
                         std::size_t n_diseases);

  // The variant's tensors in fixed (name, tensor) order; drives the
  // optimizer loop and the checkpoint layout.
  std::vector<std::pair<std::string, ParamTensor*>> named_params();
  std::vector<std::pair<std::string, const ParamTensor*>> named_params()
      const;

  DistanceWeights distance_weights() const;
  // Probability that the pair at these latent points is associated,
  // using the variant's head.
  double score_pair(std::span<const double> d, std::span<const double> s)
      const;
};

struct BatchPair {
  std::size_t drug;
  std::size_t disease;
  double label;  // 1 observed positive, 0 sampled negative
};

struct LossComponents {
  double total = 0.0;
  double prediction = 0.0;
  double drug_side = 0.0;
  double disease_side = 0.0;
};

struct EpochLog {
  std::size_t epoch = 0;
  double total = 0.0;
  double prediction = 0.0;
  double drug_side = 0.0;
  double disease_side = 0.0;
};

// Immutable per-run inputs: train-only profiles for both axes plus the
// neighbor lists (nmf only). Built from the split so no test positive
// ever reaches an encoder input, a reconstruction target, or the
// negative sampler.
struct TrainContext {
  AssociationMatrix train_assoc;  // bundle ids, train positives only
  DenseMatrix drug_profiles;      // = train_assoc.values
  DenseMatrix disease_profiles;   // transpose
  NeighborSet drug_neighbors;
  NeighborSet disease_neighbors;
  TrainConfig config;
};

TrainContext make_train_context(const DatasetBundle& bundle,
                                const DataSplit& split,
                                const TrainConfig& cfg);

// Binary matrix with ones exactly at `cells`.
DenseMatrix matrix_from_cells(std::size_t rows, std::size_t cols,
                              std::span<const Cell> cells);

// Latent points for every entity: encoded from profiles for nmf, copied
// from the parameter tables otherwise.
std::pair<LatentTable, LatentTable> compute_latent_tables(
    const ModelState& state, const DenseMatrix& drug_profiles,
    const DenseMatrix& disease_profiles);

// Mean binary cross-entropy; predictions are clamped to
// [1e-12, 1 - 1e-12] before the logs.
double prediction_loss(std::span<const double> predictions,
                       std::span<const double> labels);

// Forward-only loss on one batch: prediction + alpha * drug side +
// beta * disease side (side terms over the unique batch entities; zero
// for nmf_oh / mf).
LossComponents total_loss(const TrainContext& ctx, const ModelState& state,
                          std::span<const BatchPair> batch);

// Same value, and (re)populates every parameter's grad field.
LossComponents total_loss_backward(const TrainContext& ctx,
                                   ModelState& state,
                                   std::span<const BatchPair> batch);

struct TrainingDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitResult {
  ModelState state;
  std::vector<EpochLog> log;
};

// Full training run: seeded init, per-epoch shuffle + fresh negatives
// (stream seeded with seed xor epoch), minibatch Adam on every parameter.
// epochs = 0 returns the initialized state with an empty log. Throws
// TrainingDivergence if any loss goes non-finite.
FitResult fit(const DatasetBundle& bundle, const DataSplit& split,
              const TrainConfig& cfg);

// Versioned JSON checkpoint: config, dims, all parameter values (exact
// round-trip decimals), and the training log. No timestamps: the same
// run must produce the same bytes.
void save_checkpoint(const ModelState& state, const TrainConfig& cfg,
                     std::span<const EpochLog> log,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  ModelState state;
  TrainConfig config;
  std::vector<EpochLog> log;
};

// Throws on malformed/truncated files (no partial state escapes) and,
// when expect_variant is set, on a checkpoint trained with a different
// variant.
LoadedCheckpoint load_checkpoint(
    const std::filesystem::path& path,
    std::optional<Variant> expect_variant = std::nullopt);

}  // namespace nmf
