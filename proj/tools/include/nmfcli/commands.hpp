// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the `nmf` binary. Each run_* returns a
// process exit code and, when it writes into an output directory, also
// drops a manifest.json recording the command, the resolved
// configuration, SHA-256 digests of every input file, the output paths
// and the wall time.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "nmf/dataset.hpp"
#include "nmf/trainer.hpp"

namespace nmf::cli {

// "matrix" or "triples".
AssocFormat assoc_format_from_string(std::string_view s);

struct ValidateOptions {
  std::filesystem::path assoc;
  std::filesystem::path drug_sim;
  std::filesystem::path disease_sim;
  AssocFormat format = AssocFormat::matrix;
};

// Prints axis/positive counts and one "error:" line per violation.
int run_validate(const ValidateOptions& opts, std::ostream& out);

struct TrainOptions {
  std::filesystem::path assoc;
  std::filesystem::path drug_sim;     // required for variant nmf
  std::filesystem::path disease_sim;  // required for variant nmf
  AssocFormat format = AssocFormat::matrix;
  std::filesystem::path config;  // optional JSON config file
  std::filesystem::path out_dir;

  // Flag overrides; applied on top of defaults and the config file.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<std::size_t> latent_dim;
  std::optional<double> ratio;
  std::optional<std::size_t> negatives;
  std::optional<std::size_t> epochs;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> neighbor_k;
};

// Splits, fits, and writes checkpoint.json + loss_log.tsv + manifest.json.
int run_train(const TrainOptions& opts, std::ostream& out);

struct EvaluateOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path assoc;
  AssocFormat format = AssocFormat::matrix;
  std::filesystem::path out_dir;
  // Default: the split recorded in the checkpoint.
  std::optional<double> ratio;
  std::optional<std::uint64_t> seed;
};

// Rebuilds the split, evaluates, writes metrics.json + roc.tsv + pr.tsv
// + manifest.json.
int run_evaluate(const EvaluateOptions& opts, std::ostream& out);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path assoc;
  AssocFormat format = AssocFormat::matrix;
  std::string drug_id;
  std::size_t top_n = 10;
  bool exclude_known = false;
  // When set, predictions.tsv + manifest.json land here as well.
  std::optional<std::filesystem::path> out_dir;
};

int run_predict(const PredictOptions& opts, std::ostream& out);

struct SynthOptions {
  std::filesystem::path out_dir;
  std::size_t n_drugs = 50;
  std::size_t n_diseases = 40;
  std::size_t latent_dim = 8;
  double density = 0.05;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

// Writes association.tsv, drug_sim.tsv, disease_sim.tsv, provenance.json
// + manifest.json. Same options -> same bytes.
int run_synth(const SynthOptions& opts, std::ostream& out);

}  // namespace nmf::cli
