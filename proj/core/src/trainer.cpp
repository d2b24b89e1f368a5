// SPDX-License-Identifier: Apache-2.0

#include "nmf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "nmf/log.hpp"

namespace nmf {
namespace {

using json = nlohmann::json;

constexpr double kProbClamp = 1e-12;
// Keeps the shuffle stream disjoint from the init stream (seeded with the
// raw config seed) and the negative streams (seed xor epoch).
constexpr std::uint64_t kShuffleSalt = 0x517cc1b727220a95ull;

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double bce_term(double p, double label) {
  double pc = clamp_prob(p);
  return label == 1.0 ? -std::log(pc) : -std::log(1.0 - pc);
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::nmf: return "nmf";
    case Variant::nmf_oh: return "nmf_oh";
    case Variant::mf: return "mf";
  }
  throw std::logic_error("to_string: bad variant");
}

Variant variant_from_string(std::string_view s) {
  if (s == "nmf") return Variant::nmf;
  if (s == "nmf_oh" || s == "nmf-oh") return Variant::nmf_oh;
  if (s == "mf") return Variant::mf;
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (expected nmf, nmf_oh or mf)");
}

void TrainConfig::validate() const {
  if (latent_dim == 0)
    throw std::invalid_argument("config: latent_dim must be > 0");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("config: learning_rate must be > 0");
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw std::invalid_argument("config: alpha and beta must be >= 0");
  if (batch_size == 0)
    throw std::invalid_argument("config: batch_size must be > 0");
  if (!(split_ratio >= 0.0 && split_ratio <= 1.0))
    throw std::invalid_argument("config: split_ratio outside [0,1]");
}

namespace {

json config_to_json(const TrainConfig& cfg) {
  json j;
  j["latent_dim"] = cfg.latent_dim;
  j["learning_rate"] = cfg.learning_rate;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["epochs"] = cfg.epochs;
  j["negatives_per_positive"] = cfg.negatives_per_positive;
  j["neighbor_k"] = cfg.neighbor_k;
  j["seed"] = cfg.seed;
  j["variant"] = std::string(to_string(cfg.variant));
  j["batch_size"] = cfg.batch_size;
  j["split_ratio"] = cfg.split_ratio;
  return j;
}

TrainConfig config_from_json(const json& j, const TrainConfig& base) {
  if (!j.is_object())
    throw std::runtime_error("config: expected a JSON object");
  TrainConfig cfg = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "latent_dim")
        cfg.latent_dim = value.get<std::size_t>();
      else if (key == "learning_rate")
        cfg.learning_rate = value.get<double>();
      else if (key == "alpha")
        cfg.alpha = value.get<double>();
      else if (key == "beta")
        cfg.beta = value.get<double>();
      else if (key == "epochs")
        cfg.epochs = value.get<std::size_t>();
      else if (key == "negatives_per_positive")
        cfg.negatives_per_positive = value.get<std::size_t>();
      else if (key == "neighbor_k")
        cfg.neighbor_k = value.get<std::size_t>();
      else if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "variant")
        cfg.variant = variant_from_string(value.get<std::string>());
      else if (key == "batch_size")
        cfg.batch_size = value.get<std::size_t>();
      else if (key == "split_ratio")
        cfg.split_ratio = value.get<double>();
      else
        throw std::runtime_error("unknown key");
    } catch (const std::exception& e) {
      throw std::runtime_error("config: bad entry '" + key +
                               "': " + e.what());
    }
  }
  return cfg;
}

}  // namespace

std::string train_config_json(const TrainConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

TrainConfig parse_train_config_json(std::string_view text,
                                    const TrainConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") +
                             e.what());
  }
  return config_from_json(j, base);
}

ModelState ModelState::with_shapes(Variant variant, std::size_t latent_dim,
                                   std::size_t n_drugs,
                                   std::size_t n_diseases) {
  ModelState s;
  s.variant = variant;
  s.latent_dim = latent_dim;
  s.n_drugs = n_drugs;
  s.n_diseases = n_diseases;
  if (variant == Variant::nmf) {
    s.drug_encoder.emplace(latent_dim, n_diseases);
    s.disease_encoder.emplace(latent_dim, n_drugs);
  } else {
    s.drug_table.emplace(n_drugs, latent_dim);
    s.disease_table.emplace(n_diseases, latent_dim);
  }
  if (variant != Variant::mf) s.distance_raw.emplace(latent_dim, 1);
  return s;
}

ModelState ModelState::init(const TrainConfig& cfg, std::size_t n_drugs,
                            std::size_t n_diseases) {
  cfg.validate();
  ModelState s =
      with_shapes(cfg.variant, cfg.latent_dim, n_drugs, n_diseases);
  RngStream rng(cfg.seed);
  if (s.drug_encoder) s.drug_encoder->init(rng);
  if (s.disease_encoder) s.disease_encoder->init(rng);
  if (s.drug_table)
    for (std::size_t i = 0; i < s.drug_table->value.size(); ++i)
      s.drug_table->value.data()[i] = rng.uniform_double();
  if (s.disease_table)
    for (std::size_t i = 0; i < s.disease_table->value.size(); ++i)
      s.disease_table->value.data()[i] = rng.uniform_double();
  if (s.distance_raw)
    s.distance_raw->value.fill(inverse_softplus(1.0));
  return s;
}

std::vector<std::pair<std::string, ParamTensor*>> ModelState::named_params() {
  std::vector<std::pair<std::string, ParamTensor*>> out;
  if (drug_encoder) {
    out.emplace_back("drug_encoder.weight_enc", &drug_encoder->weight_enc);
    out.emplace_back("drug_encoder.bias_enc", &drug_encoder->bias_enc);
    out.emplace_back("drug_encoder.weight_dec", &drug_encoder->weight_dec);
    out.emplace_back("drug_encoder.bias_dec", &drug_encoder->bias_dec);
  }
  if (disease_encoder) {
    out.emplace_back("disease_encoder.weight_enc",
                     &disease_encoder->weight_enc);
    out.emplace_back("disease_encoder.bias_enc", &disease_encoder->bias_enc);
    out.emplace_back("disease_encoder.weight_dec",
                     &disease_encoder->weight_dec);
    out.emplace_back("disease_encoder.bias_dec", &disease_encoder->bias_dec);
  }
  if (drug_table) out.emplace_back("drug_table", &*drug_table);
  if (disease_table) out.emplace_back("disease_table", &*disease_table);
  if (distance_raw) out.emplace_back("distance_raw", &*distance_raw);
  return out;
}

std::vector<std::pair<std::string, const ParamTensor*>>
ModelState::named_params() const {
  auto mut = const_cast<ModelState*>(this)->named_params();
  std::vector<std::pair<std::string, const ParamTensor*>> out;
  out.reserve(mut.size());
  for (auto& [name, p] : mut) out.emplace_back(std::move(name), p);
  return out;
}

DistanceWeights ModelState::distance_weights() const {
  if (!distance_raw)
    throw std::logic_error("distance_weights: variant has no metric head");
  const double* raw = distance_raw->value.data();
  return DistanceWeights(
      std::vector<double>(raw, raw + distance_raw->value.size()));
}

double ModelState::score_pair(std::span<const double> d,
                              std::span<const double> s) const {
  if (variant == Variant::mf) return inner_product_score(d, s);
  return distance_to_probability(
      generalized_distance(d, s, distance_weights()));
}

DenseMatrix matrix_from_cells(std::size_t rows, std::size_t cols,
                              std::span<const Cell> cells) {
  DenseMatrix m(rows, cols);
  for (const Cell& cell : cells) {
    if (cell.first >= rows || cell.second >= cols)
      throw std::out_of_range("matrix_from_cells: cell outside matrix");
    m(cell.first, cell.second) = 1.0;
  }
  return m;
}

TrainContext make_train_context(const DatasetBundle& bundle,
                                const DataSplit& split,
                                const TrainConfig& cfg) {
  cfg.validate();
  TrainContext ctx;
  ctx.config = cfg;
  const AssociationMatrix& assoc = bundle.associations;
  ctx.train_assoc.drug_ids = assoc.drug_ids;
  ctx.train_assoc.disease_ids = assoc.disease_ids;
  ctx.train_assoc.values = matrix_from_cells(
      assoc.n_drugs(), assoc.n_diseases(), split.train_positives);
  ctx.drug_profiles = ctx.train_assoc.values;
  ctx.disease_profiles = DenseMatrix(assoc.n_diseases(), assoc.n_drugs());
  for (std::size_t r = 0; r < assoc.n_drugs(); ++r)
    for (std::size_t c = 0; c < assoc.n_diseases(); ++c)
      ctx.disease_profiles(c, r) = ctx.drug_profiles(r, c);
  if (cfg.variant == Variant::nmf) {
    ctx.drug_neighbors =
        NeighborSet::from_similarity(bundle.drug_sim, cfg.neighbor_k);
    ctx.disease_neighbors =
        NeighborSet::from_similarity(bundle.disease_sim, cfg.neighbor_k);
  }
  return ctx;
}

std::pair<LatentTable, LatentTable> compute_latent_tables(
    const ModelState& state, const DenseMatrix& drug_profiles,
    const DenseMatrix& disease_profiles) {
  LatentTable D(state.n_drugs, state.latent_dim);
  LatentTable S(state.n_diseases, state.latent_dim);
  if (state.variant == Variant::nmf) {
    for (std::size_t i = 0; i < state.n_drugs; ++i) {
      std::vector<double> p = encode(drug_profiles.row(i),
                                     *state.drug_encoder);
      std::copy(p.begin(), p.end(), D.points.row(i).begin());
    }
    for (std::size_t j = 0; j < state.n_diseases; ++j) {
      std::vector<double> p = encode(disease_profiles.row(j),
                                     *state.disease_encoder);
      std::copy(p.begin(), p.end(), S.points.row(j).begin());
    }
  } else {
    D.points = state.drug_table->value;
    S.points = state.disease_table->value;
  }
  return {std::move(D), std::move(S)};
}

double prediction_loss(std::span<const double> predictions,
                       std::span<const double> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("prediction_loss: size mismatch");
  if (predictions.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    acc += bce_term(predictions[i], labels[i]);
  return acc / static_cast<double>(predictions.size());
}

namespace {

std::vector<std::size_t> unique_sorted(std::vector<std::size_t> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

LossComponents loss_impl(const TrainContext& ctx, ModelState& state,
                         std::span<const BatchPair> batch, bool backward) {
  const TrainConfig& cfg = ctx.config;
  if (state.variant != cfg.variant)
    throw std::invalid_argument("loss: state/config variant mismatch");
  LossComponents comps;
  if (batch.empty()) return comps;
  for (const BatchPair& pair : batch)
    if (pair.drug >= state.n_drugs || pair.disease >= state.n_diseases)
      throw std::out_of_range("loss: pair outside matrix");

  if (backward)
    for (auto& [name, p] : state.named_params()) p->zero_grad();

  auto [D, S] = compute_latent_tables(state, ctx.drug_profiles,
                                      ctx.disease_profiles);
  std::size_t k = state.latent_dim;
  bool metric_head = state.variant != Variant::mf;
  bool has_encoders = state.variant == Variant::nmf;

  // Latent gradients accumulate here: a scratch matrix when an encoder
  // sits behind the points, the table's own grad field otherwise.
  DenseMatrix scratch_gd, scratch_gs;
  DenseMatrix* gD = nullptr;
  DenseMatrix* gS = nullptr;
  if (backward) {
    if (has_encoders) {
      scratch_gd = DenseMatrix(state.n_drugs, k);
      scratch_gs = DenseMatrix(state.n_diseases, k);
      gD = &scratch_gd;
      gS = &scratch_gs;
    } else {
      gD = &state.drug_table->grad;
      gS = &state.disease_table->grad;
    }
  }

  std::vector<double> eff;
  if (metric_head) eff = state.distance_weights().effective();
  double invB = 1.0 / static_cast<double>(batch.size());

  double loss_p = 0.0;
  for (const BatchPair& pair : batch) {
    std::span<const double> d = D.points.row(pair.drug);
    std::span<const double> s = S.points.row(pair.disease);
    double p_raw;
    double dot_or_dist = 0.0;
    if (metric_head) {
      for (std::size_t t = 0; t < k; ++t) {
        double diff = d[t] - s[t];
        dot_or_dist += eff[t] * diff * diff;
      }
      p_raw = sigmoid(-dot_or_dist);
    } else {
      for (std::size_t t = 0; t < k; ++t) dot_or_dist += d[t] * s[t];
      p_raw = sigmoid(dot_or_dist);
    }
    loss_p += bce_term(p_raw, pair.label);
    if (!backward) continue;
    // Clamped predictions contribute a constant, hence zero gradient.
    if (p_raw != clamp_prob(p_raw)) continue;
    if (metric_head) {
      double gE = (pair.label - p_raw) * invB;
      double* graw = state.distance_raw->grad.data();
      const double* raw = state.distance_raw->value.data();
      for (std::size_t t = 0; t < k; ++t) {
        double diff = d[t] - s[t];
        double gpoint = gE * 2.0 * eff[t] * diff;
        (*gD)(pair.drug, t) += gpoint;
        (*gS)(pair.disease, t) -= gpoint;
        graw[t] += gE * diff * diff * sigmoid(raw[t]);
      }
    } else {
      double gu = (p_raw - pair.label) * invB;
      for (std::size_t t = 0; t < k; ++t) {
        (*gD)(pair.drug, t) += gu * s[t];
        (*gS)(pair.disease, t) += gu * d[t];
      }
    }
  }
  comps.prediction = loss_p * invB;

  if (has_encoders) {
    std::vector<std::size_t> drugs, diseases;
    drugs.reserve(batch.size());
    diseases.reserve(batch.size());
    for (const BatchPair& pair : batch) {
      drugs.push_back(pair.drug);
      diseases.push_back(pair.disease);
    }
    drugs = unique_sorted(std::move(drugs));
    diseases = unique_sorted(std::move(diseases));
    if (backward) {
      comps.drug_side = side_loss_backward(
          ctx.drug_profiles, drugs, *state.drug_encoder, D,
          ctx.drug_neighbors, cfg.alpha, *gD);
      comps.disease_side = side_loss_backward(
          ctx.disease_profiles, diseases, *state.disease_encoder, S,
          ctx.disease_neighbors, cfg.beta, *gS);
    } else {
      comps.drug_side = side_loss(ctx.drug_profiles, drugs,
                                  *state.drug_encoder, D,
                                  ctx.drug_neighbors);
      comps.disease_side = side_loss(ctx.disease_profiles, diseases,
                                     *state.disease_encoder, S,
                                     ctx.disease_neighbors);
    }
  }

  if (backward && has_encoders) {
    // Chain latent gradients through the encoders, skipping untouched rows.
    for (std::size_t i = 0; i < state.n_drugs; ++i) {
      std::span<const double> g = gD->row(i);
      bool touched = std::any_of(g.begin(), g.end(),
                                 [](double x) { return x != 0.0; });
      if (touched)
        encode_backward(ctx.drug_profiles.row(i), *state.drug_encoder,
                        D.points.row(i), g);
    }
    for (std::size_t j = 0; j < state.n_diseases; ++j) {
      std::span<const double> g = gS->row(j);
      bool touched = std::any_of(g.begin(), g.end(),
                                 [](double x) { return x != 0.0; });
      if (touched)
        encode_backward(ctx.disease_profiles.row(j), *state.disease_encoder,
                        S.points.row(j), g);
    }
  }

  comps.total = comps.prediction + cfg.alpha * comps.drug_side +
                cfg.beta * comps.disease_side;
  return comps;
}

}  // namespace

LossComponents total_loss(const TrainContext& ctx, const ModelState& state,
                          std::span<const BatchPair> batch) {
  return loss_impl(ctx, const_cast<ModelState&>(state), batch, false);
}

LossComponents total_loss_backward(const TrainContext& ctx,
                                   ModelState& state,
                                   std::span<const BatchPair> batch) {
  return loss_impl(ctx, state, batch, true);
}

FitResult fit(const DatasetBundle& bundle, const DataSplit& split,
              const TrainConfig& cfg) {
  cfg.validate();
  TrainContext ctx = make_train_context(bundle, split, cfg);
  std::size_t n_drugs = bundle.associations.n_drugs();
  std::size_t n_diseases = bundle.associations.n_diseases();

  FitResult result;
  result.state = ModelState::init(cfg, n_drugs, n_diseases);
  auto params = result.state.named_params();
  AdamOptions adam;
  adam.learning_rate = cfg.learning_rate;

  std::vector<Cell> positives = split.train_positives;
  RngStream shuffle_rng(cfg.seed ^ kShuffleSalt);
  std::size_t npp = cfg.negatives_per_positive;

  log_info("fit: variant=" + std::string(to_string(cfg.variant)) +
           " latent_dim=" + std::to_string(cfg.latent_dim) + " epochs=" +
           std::to_string(cfg.epochs) + " train_positives=" +
           std::to_string(positives.size()));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(positives);
    NegativeBatch negs = sample_negatives(ctx.train_assoc, npp,
                                          positives.size(), cfg.seed, epoch);

    LossComponents agg;
    double weight_sum = 0.0;
    std::vector<BatchPair> batch;
    for (std::size_t start = 0; start < positives.size();
         start += cfg.batch_size) {
      std::size_t chunk =
          std::min(cfg.batch_size, positives.size() - start);
      batch.clear();
      for (std::size_t i = 0; i < chunk; ++i)
        batch.push_back(
            {positives[start + i].first, positives[start + i].second, 1.0});
      for (std::size_t i = start * npp; i < (start + chunk) * npp; ++i)
        batch.push_back(
            {negs.cells[i].first, negs.cells[i].second, 0.0});

      LossComponents comps = total_loss_backward(ctx, result.state, batch);
      if (!std::isfinite(comps.total) || !std::isfinite(comps.prediction) ||
          !std::isfinite(comps.drug_side) ||
          !std::isfinite(comps.disease_side))
        throw TrainingDivergence(
            "training diverged at epoch " + std::to_string(epoch) +
            ", batch offset " + std::to_string(start) +
            ": loss=" + std::to_string(comps.total) +
            " prediction=" + std::to_string(comps.prediction) +
            " drug_side=" + std::to_string(comps.drug_side) +
            " disease_side=" + std::to_string(comps.disease_side));
      for (auto& [name, p] : params) adam_step(*p, adam);

      double w = static_cast<double>(batch.size());
      agg.total += comps.total * w;
      agg.prediction += comps.prediction * w;
      agg.drug_side += comps.drug_side * w;
      agg.disease_side += comps.disease_side * w;
      weight_sum += w;
    }

    EpochLog entry;
    entry.epoch = epoch + 1;
    if (weight_sum > 0.0) {
      entry.total = agg.total / weight_sum;
      entry.prediction = agg.prediction / weight_sum;
      entry.drug_side = agg.drug_side / weight_sum;
      entry.disease_side = agg.disease_side / weight_sum;
    }
    result.log.push_back(entry);
    log_debug("epoch " + std::to_string(epoch + 1) + "/" +
              std::to_string(cfg.epochs) + " loss=" +
              std::to_string(entry.total) + " prediction=" +
              std::to_string(entry.prediction) + " drug_side=" +
              std::to_string(entry.drug_side) + " disease_side=" +
              std::to_string(entry.disease_side));
  }
  return result;
}

}  // namespace nmf
