// SPDX-License-Identifier: Apache-2.0
//
// Ranking evaluation. Test pairs are every test positive plus every
// unobserved cell (train positives excluded), scored by the trained
// model. AUC uses the Mann-Whitney statistic with half credit for ties,
// computed exactly in integer arithmetic; AUPR is the average-precision
// step sum with ties resolved by the fixed row-major pair order.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nmf/dataset.hpp"
#include "nmf/trainer.hpp"

namespace nmf {

struct ScoredPair {
  std::size_t drug;
  std::size_t disease;
  double score;
  double label;  // 1 test positive, 0 negative
};

struct ScoredPairs {
  std::vector<ScoredPair> pairs;

  std::size_t n_pos() const;
  std::size_t n_neg() const;
};

struct RocPoint {
  double fpr;
  double tpr;
};

struct PrPoint {
  double recall;
  double precision;
};

struct MetricsReport {
  double auc = 0.0;
  double aupr = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::vector<RocPoint> roc;
  std::vector<PrPoint> pr;
};

// Scores every test positive and every candidate zero cell of the full
// matrix, excluding train positives, in row-major order. Latent points
// come from train-only profiles so evaluation inputs match what training
// was allowed to see.
ScoredPairs build_test_pairs(const ModelState& state,
                             const DatasetBundle& bundle,
                             const DataSplit& split);

// Exact tie-aware Mann-Whitney AUC, O(n log n). Requires at least one
// positive and one negative.
double auc(const ScoredPairs& scored);

// Average precision: mean over test positives of precision at their rank,
// ranking by score descending with ties in input order.
double aupr(const ScoredPairs& scored);

// ROC sweep over the distinct score thresholds, beginning at (0,0) and
// ending at (1,1). Trapezoidal area under these points equals auc().
std::vector<RocPoint> roc_points(const ScoredPairs& scored);

// Precision/recall curve: an anchor at (0,1) followed by one point per
// rank at which recall increases; the rectangle sum under it equals
// aupr().
std::vector<PrPoint> pr_points(const ScoredPairs& scored);

MetricsReport evaluate_model(const ModelState& state,
                             const DatasetBundle& bundle,
                             const DataSplit& split);

struct RankedCandidate {
  std::size_t disease;
  std::string disease_id;
  double score;
  bool known;  // already a positive in the input matrix
};

// Top-n diseases for one drug, scored from full-matrix profiles
// (deployment mode: no split). Known positives are flagged, and skipped
// entirely when exclude_known is set. Ties rank the lower disease index
// first. Throws if drug_id is absent.
std::vector<RankedCandidate> rank_candidates(const ModelState& state,
                                             const DatasetBundle& bundle,
                                             const std::string& drug_id,
                                             std::size_t top_n,
                                             bool exclude_known);

}  // namespace nmf
