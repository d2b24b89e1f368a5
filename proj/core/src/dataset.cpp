// SPDX-License-Identifier: Apache-2.0

#include "nmf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "nmf/textio.hpp"

namespace nmf {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& msg) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                           msg);
}

void check_unique_ids(const std::vector<std::string>& ids, const char* axis) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids) {
    if (id.empty())
      throw std::runtime_error(std::string("empty ") + axis + " id");
    if (!seen.insert(id).second)
      throw std::runtime_error(std::string("duplicate ") + axis + " id '" +
                               id + "'");
  }
}

std::string join_ids(const std::vector<std::string>& ids,
                     std::size_t limit = 50) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += ", ...";
  return out;
}

struct ParsedMatrixFile {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  DenseMatrix values;  // raw parsed doubles, no semantic checks yet
  std::vector<std::size_t> body_lines;  // source line of each row
};

// Shared reader for the matrix layout. The corner token in the header is
// optional; presence is inferred from the body width.
ParsedMatrixFile parse_matrix_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path.string());
  auto lines = split_lines(text);
  if (lines.empty()) fail_at(path, 1, "empty file");
  if (lines.size() < 2) fail_at(path, 1, "matrix file has no data rows");

  auto header = split_tabs(lines[0]);
  auto first_body = split_tabs(lines[1]);
  if (first_body.size() < 2) fail_at(path, 2, "data row needs id and values");
  // A header with H fields admits data rows of width H (corner token
  // present) or H + 1 (corner token absent); anything else means the row
  // itself is malformed.
  if (first_body.size() != header.size() &&
      first_body.size() != header.size() + 1)
    fail_at(path, 2,
            "expected " + std::to_string(header.size()) + " or " +
                std::to_string(header.size() + 1) + " fields, found " +
                std::to_string(first_body.size()));
  std::size_t n_cols = first_body.size() - 1;

  ParsedMatrixFile out;
  std::size_t skip = header.size() - n_cols;  // 1 iff corner token present
  for (std::size_t i = skip; i < header.size(); ++i)
    out.col_ids.emplace_back(header[i]);

  std::size_t n_rows = lines.size() - 1;
  out.values = DenseMatrix(n_rows, n_cols);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::size_t line_no = r + 2;
    auto fields = split_tabs(lines[r + 1]);
    if (fields.size() != n_cols + 1)
      fail_at(path, line_no,
              "expected " + std::to_string(n_cols + 1) + " fields, found " +
                  std::to_string(fields.size()));
    out.row_ids.emplace_back(fields[0]);
    out.body_lines.push_back(line_no);
    for (std::size_t c = 0; c < n_cols; ++c) {
      double v;
      if (!try_parse_double(fields[c + 1], v))
        fail_at(path, line_no,
                "cannot parse value '" + std::string(fields[c + 1]) + "'");
      out.values(r, c) = v;
    }
  }
  return out;
}

void write_matrix_layout(const std::vector<std::string>& row_ids,
                         const std::vector<std::string>& col_ids,
                         const DenseMatrix& values,
                         const std::filesystem::path& path) {
  std::string out = "id";
  for (const auto& id : col_ids) {
    out += '\t';
    out += id;
  }
  out += '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    out += row_ids[r];
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out += '\t';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  write_text_file(path.string(), out);
}

AssociationMatrix load_assoc_matrix_format(const std::filesystem::path& path) {
  ParsedMatrixFile parsed = parse_matrix_file(path);
  AssociationMatrix assoc;
  assoc.drug_ids = std::move(parsed.row_ids);
  assoc.disease_ids = std::move(parsed.col_ids);
  assoc.values = std::move(parsed.values);
  for (std::size_t r = 0; r < assoc.values.rows(); ++r)
    for (std::size_t c = 0; c < assoc.values.cols(); ++c) {
      double v = assoc.values(r, c);
      if (v != 0.0 && v != 1.0)
        fail_at(path, parsed.body_lines[r],
                "association value must be 0 or 1 at (drug " +
                    assoc.drug_ids[r] + ", disease " + assoc.disease_ids[c] +
                    "): " + format_double(v));
    }
  try {
    check_unique_ids(assoc.drug_ids, "drug");
    check_unique_ids(assoc.disease_ids, "disease");
  } catch (const std::exception& e) {
    fail_at(path, 1, e.what());
  }
  return assoc;
}

AssociationMatrix load_assoc_triples_format(
    const std::filesystem::path& path) {
  std::string text = read_text_file(path.string());
  auto lines = split_lines(text);

  AssociationMatrix assoc;
  // Keys must own their storage: views into the growing ids vector would
  // dangle when reallocation moves the strings.
  std::unordered_map<std::string, std::size_t> drug_index;
  std::unordered_map<std::string, std::size_t> disease_index;
  auto intern = [](std::vector<std::string>& ids,
                   std::unordered_map<std::string, std::size_t>& index,
                   std::string_view id) -> std::size_t {
    std::string key(id);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    ids.push_back(key);
    std::size_t pos = ids.size() - 1;
    index.emplace(std::move(key), pos);
    return pos;
  };

  // Optional #drugs / #diseases directives pin the axis ordering.
  std::size_t li = 0;
  for (; li < lines.size(); ++li) {
    auto fields = split_tabs(lines[li]);
    if (fields.empty() || fields[0].empty() || fields[0][0] != '#') break;
    std::vector<std::string>* ids = nullptr;
    std::unordered_map<std::string, std::size_t>* index = nullptr;
    if (fields[0] == "#drugs") {
      ids = &assoc.drug_ids;
      index = &drug_index;
    } else if (fields[0] == "#diseases") {
      ids = &assoc.disease_ids;
      index = &disease_index;
    } else {
      fail_at(path, li + 1,
              "unknown directive '" + std::string(fields[0]) + "'");
    }
    for (std::size_t f = 1; f < fields.size(); ++f) {
      if (fields[f].empty()) fail_at(path, li + 1, "empty id in directive");
      if (index->count(std::string(fields[f])))
        fail_at(path, li + 1,
                "duplicate id '" + std::string(fields[f]) + "' in directive");
      intern(*ids, *index, fields[f]);
    }
  }

  if (li >= lines.size()) fail_at(path, lines.size(), "missing header line");
  auto header = split_tabs(lines[li]);
  if (header.size() != 3 || header[0] != "drug_id" ||
      header[1] != "disease_id" || header[2] != "value")
    fail_at(path, li + 1,
            "expected header 'drug_id<TAB>disease_id<TAB>value'");
  ++li;

  struct Triple {
    std::size_t drug, disease;
    double value;
  };
  std::vector<Triple> triples;
  std::unordered_set<std::uint64_t> seen_pairs;
  for (; li < lines.size(); ++li) {
    auto fields = split_tabs(lines[li]);
    if (fields.size() != 3)
      fail_at(path, li + 1,
              "expected 3 tab-separated fields, found " +
                  std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      fail_at(path, li + 1, "empty identifier");
    double v;
    if (!try_parse_double(fields[2], v))
      fail_at(path, li + 1,
              "cannot parse value '" + std::string(fields[2]) + "'");
    if (v != 0.0 && v != 1.0)
      fail_at(path, li + 1,
              "association value must be 0 or 1 at (drug " +
                  std::string(fields[0]) + ", disease " +
                  std::string(fields[1]) + "): " + format_double(v));
    std::size_t di = intern(assoc.drug_ids, drug_index, fields[0]);
    std::size_t si = intern(assoc.disease_ids, disease_index, fields[1]);
    std::uint64_t key =
        static_cast<std::uint64_t>(di) << 32 | static_cast<std::uint64_t>(si);
    if (!seen_pairs.insert(key).second)
      fail_at(path, li + 1,
              "duplicate triple for (drug " + std::string(fields[0]) +
                  ", disease " + std::string(fields[1]) + ")");
    triples.push_back({di, si, v});
  }

  assoc.values = DenseMatrix(assoc.drug_ids.size(), assoc.disease_ids.size());
  for (const Triple& t : triples) assoc.values(t.drug, t.disease) = t.value;
  return assoc;
}

}  // namespace

std::size_t AssociationMatrix::count_positives() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values.data()[i] == 1.0) ++n;
  return n;
}

std::vector<Cell> AssociationMatrix::positive_cells() const {
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < values.rows(); ++r)
    for (std::size_t c = 0; c < values.cols(); ++c)
      if (values(r, c) == 1.0) cells.emplace_back(r, c);
  return cells;
}

void AssociationMatrix::validate() const {
  if (values.rows() != drug_ids.size() ||
      values.cols() != disease_ids.size())
    throw std::runtime_error(
        "association matrix shape does not match id lists");
  check_unique_ids(drug_ids, "drug");
  check_unique_ids(disease_ids, "disease");
  for (std::size_t r = 0; r < values.rows(); ++r)
    for (std::size_t c = 0; c < values.cols(); ++c) {
      double v = values(r, c);
      if (v != 0.0 && v != 1.0)
        throw std::runtime_error("association value not in {0,1} at (drug " +
                                 drug_ids[r] + ", disease " + disease_ids[c] +
                                 "): " + format_double(v));
    }
}

void SimilarityMatrix::validate() const {
  if (values.rows() != ids.size() || values.cols() != ids.size())
    throw std::runtime_error("similarity matrix is not square over its ids");
  check_unique_ids(ids, "similarity");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (values(i, i) != 1.0)
      throw std::runtime_error("similarity diagonal entry for '" + ids[i] +
                               "' is " + format_double(values(i, i)) +
                               ", expected 1");
    for (std::size_t j = 0; j < ids.size(); ++j) {
      double v = values(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::runtime_error("similarity value out of [0,1] at (" +
                                 ids[i] + ", " + ids[j] +
                                 "): " + format_double(v));
      if (std::fabs(v - values(j, i)) > 1e-9)
        throw std::runtime_error("similarity asymmetry at (" + ids[i] + ", " +
                                 ids[j] + "): " + format_double(v) + " vs " +
                                 format_double(values(j, i)));
    }
  }
}

void DatasetBundle::validate() const {
  associations.validate();
  drug_sim.validate();
  disease_sim.validate();
  if (drug_sim.ids != associations.drug_ids)
    throw std::runtime_error(
        "drug id order mismatch; associations order [" +
        join_ids(associations.drug_ids) + "] vs drug similarity order [" +
        join_ids(drug_sim.ids) + "]");
  if (disease_sim.ids != associations.disease_ids)
    throw std::runtime_error(
        "disease id order mismatch; associations order [" +
        join_ids(associations.disease_ids) +
        "] vs disease similarity order [" + join_ids(disease_sim.ids) + "]");
}

AssociationMatrix load_association_matrix(const std::filesystem::path& path,
                                          AssocFormat format) {
  AssociationMatrix assoc = format == AssocFormat::matrix
                                ? load_assoc_matrix_format(path)
                                : load_assoc_triples_format(path);
  assoc.validate();
  return assoc;
}

void write_association_matrix(const AssociationMatrix& assoc,
                              const std::filesystem::path& path,
                              AssocFormat format) {
  if (format == AssocFormat::matrix) {
    write_matrix_layout(assoc.drug_ids, assoc.disease_ids, assoc.values,
                        path);
    return;
  }
  std::string out = "#drugs";
  for (const auto& id : assoc.drug_ids) {
    out += '\t';
    out += id;
  }
  out += "\n#diseases";
  for (const auto& id : assoc.disease_ids) {
    out += '\t';
    out += id;
  }
  out += "\ndrug_id\tdisease_id\tvalue\n";
  for (std::size_t r = 0; r < assoc.values.rows(); ++r)
    for (std::size_t c = 0; c < assoc.values.cols(); ++c)
      if (assoc.values(r, c) == 1.0) {
        out += assoc.drug_ids[r];
        out += '\t';
        out += assoc.disease_ids[c];
        out += "\t1\n";
      }
  write_text_file(path.string(), out);
}

SimilarityMatrix load_similarity_matrix(const std::filesystem::path& path) {
  ParsedMatrixFile parsed = parse_matrix_file(path);
  if (parsed.row_ids.size() != parsed.col_ids.size())
    fail_at(path, 1,
            "similarity matrix is not square: " +
                std::to_string(parsed.row_ids.size()) + " rows vs " +
                std::to_string(parsed.col_ids.size()) + " columns");
  for (std::size_t i = 0; i < parsed.row_ids.size(); ++i)
    if (parsed.row_ids[i] != parsed.col_ids[i])
      fail_at(path, parsed.body_lines[i],
              "row id '" + parsed.row_ids[i] + "' does not match column id '" +
                  parsed.col_ids[i] + "' at position " + std::to_string(i));

  SimilarityMatrix sim;
  sim.ids = std::move(parsed.col_ids);
  sim.values = std::move(parsed.values);
  std::size_t n = sim.ids.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double v = sim.values(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        fail_at(path, parsed.body_lines[i],
                "similarity value out of [0,1] at (" + sim.ids[i] + ", " +
                    sim.ids[j] + "): " + format_double(v));
    }
  for (std::size_t i = 0; i < n; ++i) {
    double d = sim.values(i, i);
    if (std::fabs(d - 1.0) > 1e-9)
      fail_at(path, parsed.body_lines[i],
              "diagonal entry for '" + sim.ids[i] + "' is " +
                  format_double(d) + ", expected 1");
    sim.values(i, i) = 1.0;
  }
  // Tolerate asymmetries up to 1e-6 by averaging; larger ones are data bugs.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = sim.values(i, j);
      double b = sim.values(j, i);
      if (std::fabs(a - b) > 1e-6)
        fail_at(path, parsed.body_lines[i],
                "asymmetry beyond tolerance at (" + sim.ids[i] + ", " +
                    sim.ids[j] + "): " + format_double(a) + " vs " +
                    format_double(b));
      double avg = 0.5 * (a + b);
      sim.values(i, j) = avg;
      sim.values(j, i) = avg;
    }
  try {
    check_unique_ids(sim.ids, "similarity");
  } catch (const std::exception& e) {
    fail_at(path, 1, e.what());
  }
  sim.validate();
  return sim;
}

void write_similarity_matrix(const SimilarityMatrix& sim,
                             const std::filesystem::path& path) {
  write_matrix_layout(sim.ids, sim.ids, sim.values, path);
}

DataSplit split_associations(const AssociationMatrix& assoc, double ratio,
                             std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw std::invalid_argument("split_associations: ratio outside [0,1]");
  std::vector<Cell> cells = assoc.positive_cells();
  RngStream rng(seed);
  rng.shuffle(cells);
  std::size_t n_train =
      static_cast<std::size_t>(std::llround(ratio * cells.size()));
  DataSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.train_positives.assign(cells.begin(), cells.begin() + n_train);
  split.test_positives.assign(cells.begin() + n_train, cells.end());
  std::sort(split.train_positives.begin(), split.train_positives.end());
  std::sort(split.test_positives.begin(), split.test_positives.end());
  return split;
}

NegativeBatch sample_negatives(const AssociationMatrix& assoc,
                               std::size_t per_positive,
                               std::size_t batch_positives,
                               std::uint64_t seed, std::uint64_t epoch) {
  std::size_t n_cells = assoc.values.rows() * assoc.values.cols();
  std::size_t zeros = n_cells - assoc.count_positives();
  std::size_t requested = per_positive * batch_positives;
  if (requested > zeros)
    throw std::invalid_argument(
        "sample_negatives: requested " + std::to_string(requested) +
        " negatives but only " + std::to_string(zeros) + " zero cells exist");

  NegativeBatch batch;
  batch.per_positive = per_positive;
  if (requested == 0) return batch;
  RngStream rng(seed ^ epoch);
  std::size_t cols = assoc.values.cols();

  if (requested * 2 > zeros) {
    // Dense regime: select without replacement from the explicit zero list.
    std::vector<std::uint64_t> pool;
    pool.reserve(zeros);
    for (std::size_t r = 0; r < assoc.values.rows(); ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (assoc.values(r, c) == 0.0) pool.push_back(r * cols + c);
    for (std::size_t i = 0; i < requested; ++i) {
      std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      batch.cells.emplace_back(pool[i] / cols, pool[i] % cols);
    }
  } else {
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(requested * 2);
    while (batch.cells.size() < requested) {
      std::size_t r = rng.uniform_index(assoc.values.rows());
      std::size_t c = rng.uniform_index(cols);
      if (assoc.values(r, c) != 0.0) continue;
      if (!taken.insert(r * cols + c).second) continue;
      batch.cells.emplace_back(r, c);
    }
  }
  return batch;
}

SimilarityMatrix jaccard_similarity_from_associations(
    const AssociationMatrix& assoc, Axis axis) {
  SimilarityMatrix sim;
  const DenseMatrix& R = assoc.values;
  std::size_t n, len;
  DenseMatrix profiles;
  if (axis == Axis::drugs) {
    sim.ids = assoc.drug_ids;
    n = R.rows();
    len = R.cols();
    profiles = R;
  } else {
    sim.ids = assoc.disease_ids;
    n = R.cols();
    len = R.rows();
    profiles = DenseMatrix(n, len);
    for (std::size_t r = 0; r < R.rows(); ++r)
      for (std::size_t c = 0; c < R.cols(); ++c) profiles(c, r) = R(r, c);
  }
  sim.values = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sim.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t inter = 0, uni = 0;
      const double* a = profiles.data() + i * len;
      const double* b = profiles.data() + j * len;
      for (std::size_t t = 0; t < len; ++t) {
        bool xa = a[t] == 1.0;
        bool xb = b[t] == 1.0;
        inter += xa && xb;
        uni += xa || xb;
      }
      double v = uni == 0 ? 0.0
                          : static_cast<double>(inter) /
                                static_cast<double>(uni);
      sim.values(i, j) = v;
      sim.values(j, i) = v;
    }
  }
  return sim;
}

namespace {

std::vector<std::string> make_ids(const char* stem, std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%s_%04zu", stem, i + 1);
    ids.emplace_back(buf);
  }
  return ids;
}

// Pairwise Euclidean point distances rescaled to similarities in [0,1]:
// the farthest pair maps to 0, coincident points to 1.
SimilarityMatrix similarity_from_points(const DenseMatrix& points,
                                        std::vector<std::string> ids) {
  std::size_t n = points.rows();
  std::size_t k = points.cols();
  DenseMatrix dist(n, n);
  double max_dist = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        double d = points(i, t) - points(j, t);
        acc += d * d;
      }
      double d = std::sqrt(acc);
      dist(i, j) = d;
      dist(j, i) = d;
      max_dist = std::max(max_dist, d);
    }
  SimilarityMatrix sim;
  sim.ids = std::move(ids);
  sim.values = DenseMatrix(n, n, 1.0);
  if (max_dist > 0.0)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) sim.values(i, j) = 1.0 - dist(i, j) / max_dist;
  return sim;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_drugs == 0 || spec.n_diseases == 0 || spec.latent_dim == 0)
    throw std::invalid_argument("generate_synthetic: dimensions must be > 0");
  if (!(spec.density >= 0.0 && spec.density <= 1.0) ||
      !(spec.noise >= 0.0 && spec.noise <= 1.0))
    throw std::invalid_argument(
        "generate_synthetic: density and noise must lie in [0,1]");

  RngStream rng(spec.seed);
  // Draw order is part of the contract: drug points, disease points, then
  // the noise permutation. Changing it would silently change every output.
  DenseMatrix drug_points(spec.n_drugs, spec.latent_dim);
  for (std::size_t i = 0; i < drug_points.size(); ++i)
    drug_points.data()[i] = rng.uniform_double();
  DenseMatrix disease_points(spec.n_diseases, spec.latent_dim);
  for (std::size_t i = 0; i < disease_points.size(); ++i)
    disease_points.data()[i] = rng.uniform_double();

  std::size_t n_cells = spec.n_drugs * spec.n_diseases;
  std::vector<std::pair<double, std::uint64_t>> ranked;
  ranked.reserve(n_cells);
  for (std::size_t i = 0; i < spec.n_drugs; ++i)
    for (std::size_t j = 0; j < spec.n_diseases; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < spec.latent_dim; ++t) {
        double d = drug_points(i, t) - disease_points(j, t);
        acc += d * d;
      }
      ranked.emplace_back(acc, i * spec.n_diseases + j);
    }
  std::sort(ranked.begin(), ranked.end());

  SyntheticData out;
  out.drug_points = drug_points;
  out.disease_points = disease_points;
  AssociationMatrix& assoc = out.bundle.associations;
  assoc.drug_ids = make_ids("drug", spec.n_drugs);
  assoc.disease_ids = make_ids("disease", spec.n_diseases);
  assoc.values = DenseMatrix(spec.n_drugs, spec.n_diseases);
  std::size_t n_pos = static_cast<std::size_t>(
      std::llround(spec.density * static_cast<double>(n_cells)));
  for (std::size_t p = 0; p < n_pos; ++p)
    assoc.values.data()[ranked[p].second] = 1.0;

  std::size_t n_flips = static_cast<std::size_t>(
      std::llround(spec.noise * static_cast<double>(n_cells)));
  if (n_flips > 0) {
    std::vector<std::uint64_t> cells(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) cells[i] = i;
    for (std::size_t i = 0; i < n_flips; ++i) {
      std::size_t j = i + rng.uniform_index(n_cells - i);
      std::swap(cells[i], cells[j]);
      double& v = assoc.values.data()[cells[i]];
      v = v == 1.0 ? 0.0 : 1.0;
    }
  }

  out.bundle.drug_sim = similarity_from_points(drug_points, assoc.drug_ids);
  out.bundle.disease_sim =
      similarity_from_points(disease_points, assoc.disease_ids);
  out.bundle.validate();
  return out;
}

void write_synthetic_dataset(const SyntheticData& data,
                             const SyntheticSpec& spec,
                             const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_association_matrix(data.bundle.associations,
                           out_dir / "association.tsv", AssocFormat::matrix);
  write_similarity_matrix(data.bundle.drug_sim, out_dir / "drug_sim.tsv");
  write_similarity_matrix(data.bundle.disease_sim,
                          out_dir / "disease_sim.tsv");
  json prov;
  prov["format"] = "nmf/synthetic-provenance";
  prov["version"] = 1;
  prov["n_drugs"] = spec.n_drugs;
  prov["n_diseases"] = spec.n_diseases;
  prov["latent_dim"] = spec.latent_dim;
  prov["density"] = spec.density;
  prov["noise"] = spec.noise;
  prov["seed"] = spec.seed;
  write_text_file((out_dir / "provenance.json").string(), prov.dump(2) + "\n");
}

}  // namespace nmf
