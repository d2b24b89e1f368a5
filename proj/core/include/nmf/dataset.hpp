// SPDX-License-Identifier: Apache-2.0
//
// Data layer: binary drug-disease association matrices, precomputed
// similarity matrices, train/test splitting over positive cells, per-epoch
// negative sampling, Jaccard similarities derived from association
// profiles, and a synthetic generator with planted latent structure.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nmf/numkit.hpp"

namespace nmf {

using Cell = std::pair<std::size_t, std::size_t>;  // (drug row, disease col)

// Binary association matrix with named axes. values(i,j) in {0.0, 1.0};
// ids on each axis are unique and index-aligned with the matrix.
struct AssociationMatrix {
  std::vector<std::string> drug_ids;
  std::vector<std::string> disease_ids;
  DenseMatrix values;

  std::size_t n_drugs() const { return drug_ids.size(); }
  std::size_t n_diseases() const { return disease_ids.size(); }
  std::size_t count_positives() const;
  // All (i,j) with values(i,j) == 1, row-major order.
  std::vector<Cell> positive_cells() const;

  // Throws std::runtime_error describing the first violation found.
  void validate() const;
};

// Square symmetric similarity matrix, one row/col per entity, entries in
// [0,1], unit diagonal. Symmetry holds to 1e-9 after loading (the loader
// averages small asymmetries away; in-memory construction must respect it).
struct SimilarityMatrix {
  std::vector<std::string> ids;
  DenseMatrix values;

  std::size_t size() const { return ids.size(); }
  void validate() const;
};

// Associations plus both similarity views with consistent id ordering.
struct DatasetBundle {
  AssociationMatrix associations;
  SimilarityMatrix drug_sim;
  SimilarityMatrix disease_sim;

  void validate() const;
};

// Disjoint partition of the positive cells. Both lists are sorted
// row-major; train has exactly round(ratio * total) entries.
struct DataSplit {
  std::vector<Cell> train_positives;
  std::vector<Cell> test_positives;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

// Sampled zero cells, all distinct, none colliding with a known positive
// of the matrix they were drawn from.
struct NegativeBatch {
  std::vector<Cell> cells;
  std::size_t per_positive = 0;
};

enum class AssocFormat { matrix, triples };
enum class Axis { drugs, diseases };

// ---------------------------------------------------------------------------
// File formats (all tab-separated, LF line endings):
//
//   matrix:   header row "id<TAB>disease1<TAB>disease2..." (the corner token
//             is optional on input), then one row per drug:
//             "drugN<TAB>0<TAB>1...".
//   triples:  optional directive lines "#drugs<TAB>d1<TAB>d2..." and
//             "#diseases<TAB>s1..." pinning the axis order, then the header
//             "drug_id<TAB>disease_id<TAB>value", then one triple per line.
//             Unlisted ids are appended in first-appearance order. A pair
//             may appear at most once.
//
// Similarity files use the matrix layout with both axes carrying the same
// ids. All loaders throw std::runtime_error with "path:line:" context.
// ---------------------------------------------------------------------------

AssociationMatrix load_association_matrix(const std::filesystem::path& path,
                                          AssocFormat format);
void write_association_matrix(const AssociationMatrix& assoc,
                              const std::filesystem::path& path,
                              AssocFormat format);

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path);
void write_similarity_matrix(const SimilarityMatrix& sim,
                             const std::filesystem::path& path);

// Seeded shuffle of the positive cells; first round(ratio * total) become
// train. Same (matrix, ratio, seed) always yields the same split.
DataSplit split_associations(const AssociationMatrix& assoc, double ratio,
                             std::uint64_t seed);

// Draws per_positive * batch_positives distinct zero cells of assoc.
// The stream is seeded with (seed xor epoch), so each epoch resamples
// while the whole schedule stays reproducible. Throws if more cells are
// requested than zero cells exist.
NegativeBatch sample_negatives(const AssociationMatrix& assoc,
                               std::size_t per_positive,
                               std::size_t batch_positives,
                               std::uint64_t seed, std::uint64_t epoch);

// Jaccard similarity |a & b| / |a | b| between association profiles along
// the chosen axis. Two distinct all-zero profiles score 0; the diagonal is
// defined as 1 even for empty profiles.
SimilarityMatrix jaccard_similarity_from_associations(
    const AssociationMatrix& assoc, Axis axis);

struct SyntheticSpec {
  std::size_t n_drugs = 0;
  std::size_t n_diseases = 0;
  std::size_t latent_dim = 0;
  double density = 0.0;  // fraction of cells marked positive
  double noise = 0.0;    // fraction of cells flipped afterwards
  std::uint64_t seed = 0;
};

struct SyntheticData {
  DatasetBundle bundle;
  DenseMatrix drug_points;     // planted ground-truth coordinates
  DenseMatrix disease_points;
};

// Plants uniform latent points for both axes, marks the
// round(density * n_cells) closest pairs positive, flips
// round(noise * n_cells) uniformly chosen cells, and derives similarity
// matrices from planted distances rescaled to [0,1]. Fully determined by
// its arguments (same arguments, same bytes out).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes association.tsv (matrix layout), drug_sim.tsv, disease_sim.tsv
// and provenance.json (the generating parameters) into out_dir.
void write_synthetic_dataset(const SyntheticData& data,
                             const SyntheticSpec& spec,
                             const std::filesystem::path& out_dir);

}  // namespace nmf
