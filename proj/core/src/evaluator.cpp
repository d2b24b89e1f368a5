// SPDX-License-Identifier: Apache-2.0

#include "nmf/evaluator.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace nmf {

std::size_t ScoredPairs::n_pos() const {
  std::size_t n = 0;
  for (const ScoredPair& p : pairs) n += p.label == 1.0;
  return n;
}

std::size_t ScoredPairs::n_neg() const { return pairs.size() - n_pos(); }

namespace {

struct ScoreLabel {
  double score;
  double label;
};

std::vector<ScoreLabel> sorted_ascending(const ScoredPairs& scored) {
  std::vector<ScoreLabel> xs;
  xs.reserve(scored.pairs.size());
  for (const ScoredPair& p : scored.pairs) xs.push_back({p.score, p.label});
  std::sort(xs.begin(), xs.end(),
            [](const ScoreLabel& a, const ScoreLabel& b) {
              return a.score < b.score;
            });
  return xs;
}

void require_both_classes(std::size_t P, std::size_t N, const char* op) {
  if (P == 0 || N == 0)
    throw std::invalid_argument(std::string(op) +
                                ": needs at least one positive and one "
                                "negative pair");
}

// Ranked order for AUPR / PR: score descending, ties keep the caller's
// fixed pair order.
std::vector<std::size_t> ranked_order(const ScoredPairs& scored) {
  std::vector<std::size_t> order(scored.pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scored.pairs[a].score > scored.pairs[b].score;
                   });
  return order;
}

}  // namespace

double auc(const ScoredPairs& scored) {
  std::size_t P = scored.n_pos();
  std::size_t N = scored.n_neg();
  require_both_classes(P, N, "auc");

  // Tie-aware Mann-Whitney in exact integers: every (pos, neg) pair
  // contributes 2 if the positive outranks the negative, 1 on a tie.
  std::vector<ScoreLabel> xs = sorted_ascending(scored);
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    std::uint64_t pos_here = 0, neg_here = 0;
    while (j < xs.size() && xs[j].score == xs[i].score) {
      if (xs[j].label == 1.0)
        ++pos_here;
      else
        ++neg_here;
      ++j;
    }
    twice_u += pos_here * (2 * neg_below + neg_here);
    neg_below += neg_here;
    i = j;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(P) * static_cast<double>(N));
}

double aupr(const ScoredPairs& scored) {
  std::size_t P = scored.n_pos();
  require_both_classes(P, scored.n_neg(), "aupr");
  std::vector<std::size_t> order = ranked_order(scored);
  double sum = 0.0;
  std::size_t tp = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (scored.pairs[order[r]].label == 1.0) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(P);
}

std::vector<RocPoint> roc_points(const ScoredPairs& scored) {
  std::size_t P = scored.n_pos();
  std::size_t N = scored.n_neg();
  require_both_classes(P, N, "roc_points");

  std::vector<ScoreLabel> xs = sorted_ascending(scored);
  std::reverse(xs.begin(), xs.end());  // descending

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j].score == xs[i].score) {
      if (xs[j].label == 1.0)
        ++tp;
      else
        ++fp;
      ++j;
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(N),
                      static_cast<double>(tp) / static_cast<double>(P)});
    i = j;
  }
  return points;
}

std::vector<PrPoint> pr_points(const ScoredPairs& scored) {
  std::size_t P = scored.n_pos();
  require_both_classes(P, scored.n_neg(), "pr_points");
  std::vector<std::size_t> order = ranked_order(scored);

  std::vector<PrPoint> points;
  points.push_back({0.0, 1.0});
  std::size_t tp = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (scored.pairs[order[r]].label == 1.0) {
      ++tp;
      points.push_back({static_cast<double>(tp) / static_cast<double>(P),
                        static_cast<double>(tp) / static_cast<double>(r + 1)});
    }
  }
  return points;
}

ScoredPairs build_test_pairs(const ModelState& state,
                             const DatasetBundle& bundle,
                             const DataSplit& split) {
  const AssociationMatrix& assoc = bundle.associations;
  std::size_t n_drugs = assoc.n_drugs();
  std::size_t n_diseases = assoc.n_diseases();
  if (state.n_drugs != n_drugs || state.n_diseases != n_diseases)
    throw std::invalid_argument(
        "build_test_pairs: model and data dimensions differ");

  enum : unsigned char { kNegative = 0, kTrain = 1, kTest = 2 };
  std::vector<unsigned char> cell_state(n_drugs * n_diseases, kNegative);
  for (const Cell& c : split.train_positives) {
    if (c.first >= n_drugs || c.second >= n_diseases)
      throw std::out_of_range("build_test_pairs: train cell out of range");
    cell_state[c.first * n_diseases + c.second] = kTrain;
  }
  for (const Cell& c : split.test_positives) {
    if (c.first >= n_drugs || c.second >= n_diseases)
      throw std::out_of_range("build_test_pairs: test cell out of range");
    cell_state[c.first * n_diseases + c.second] = kTest;
  }

  // Latent points from train-only profiles: evaluation must score with
  // exactly the inputs training was allowed to see.
  DenseMatrix drug_profiles =
      matrix_from_cells(n_drugs, n_diseases, split.train_positives);
  DenseMatrix disease_profiles(n_diseases, n_drugs);
  for (std::size_t i = 0; i < n_drugs; ++i)
    for (std::size_t j = 0; j < n_diseases; ++j)
      disease_profiles(j, i) = drug_profiles(i, j);
  auto [D, S] = compute_latent_tables(state, drug_profiles, disease_profiles);

  ScoredPairs out;
  for (std::size_t i = 0; i < n_drugs; ++i)
    for (std::size_t j = 0; j < n_diseases; ++j) {
      unsigned char st = cell_state[i * n_diseases + j];
      if (st == kTrain) continue;
      if (st == kNegative && assoc.values(i, j) == 1.0)
        throw std::invalid_argument(
            "build_test_pairs: split does not cover positive cell (" +
            assoc.drug_ids[i] + ", " + assoc.disease_ids[j] + ")");
      double score = state.score_pair(D.points.row(i), S.points.row(j));
      out.pairs.push_back({i, j, score, st == kTest ? 1.0 : 0.0});
    }
  return out;
}

MetricsReport evaluate_model(const ModelState& state,
                             const DatasetBundle& bundle,
                             const DataSplit& split) {
  ScoredPairs pairs = build_test_pairs(state, bundle, split);
  MetricsReport report;
  report.n_pos = pairs.n_pos();
  report.n_neg = pairs.n_neg();
  report.auc = auc(pairs);
  report.aupr = aupr(pairs);
  report.roc = roc_points(pairs);
  report.pr = pr_points(pairs);
  return report;
}

std::vector<RankedCandidate> rank_candidates(const ModelState& state,
                                             const DatasetBundle& bundle,
                                             const std::string& drug_id,
                                             std::size_t top_n,
                                             bool exclude_known) {
  const AssociationMatrix& assoc = bundle.associations;
  auto it = std::find(assoc.drug_ids.begin(), assoc.drug_ids.end(), drug_id);
  if (it == assoc.drug_ids.end())
    throw std::invalid_argument("rank_candidates: unknown drug id '" +
                                drug_id + "'");
  std::size_t drug = static_cast<std::size_t>(it - assoc.drug_ids.begin());
  if (state.n_drugs != assoc.n_drugs() ||
      state.n_diseases != assoc.n_diseases())
    throw std::invalid_argument(
        "rank_candidates: model and data dimensions differ");

  // Deployment mode: every known association may inform the profiles.
  DenseMatrix disease_profiles(assoc.n_diseases(), assoc.n_drugs());
  for (std::size_t i = 0; i < assoc.n_drugs(); ++i)
    for (std::size_t j = 0; j < assoc.n_diseases(); ++j)
      disease_profiles(j, i) = assoc.values(i, j);
  auto [D, S] =
      compute_latent_tables(state, assoc.values, disease_profiles);

  std::vector<RankedCandidate> out;
  out.reserve(assoc.n_diseases());
  for (std::size_t j = 0; j < assoc.n_diseases(); ++j) {
    bool known = assoc.values(drug, j) == 1.0;
    if (known && exclude_known) continue;
    double score = state.score_pair(D.points.row(drug), S.points.row(j));
    out.push_back({j, assoc.disease_ids[j], score, known});
  }
  std::sort(out.begin(), out.end(),
            [](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.disease < b.disease;
            });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

}  // namespace nmf
