// SPDX-License-Identifier: Apache-2.0

#include "nmfcli/commands.hpp"

#include <chrono>
#include <exception>
#include <functional>
#include <vector>

#include <json.hpp>

#include "nmf/digest.hpp"
#include "nmf/evaluator.hpp"
#include "nmf/log.hpp"
#include "nmf/textio.hpp"

namespace nmf::cli {
namespace {

using json = nlohmann::json;
using std::filesystem::path;

// Accumulates the run record and writes manifest.json last, so a manifest
// only ever describes outputs that were fully written.
class ManifestWriter {
 public:
  explicit ManifestWriter(std::string command)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
  }

  void set_config(json config) { doc_["config"] = std::move(config); }

  void add_input(const path& p) {
    json entry;
    entry["path"] = p.string();
    entry["sha256"] = sha256_file(p);
    doc_["inputs"].push_back(std::move(entry));
  }

  void add_output(const path& p) { doc_["outputs"].push_back(p.string()); }

  void write(const path& out_dir) {
    std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start_;
    doc_["wall_seconds"] = elapsed.count();
    write_text_file((out_dir / "manifest.json").string(),
                    doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

SimilarityMatrix identity_similarity(const std::vector<std::string>& ids) {
  SimilarityMatrix sim;
  sim.ids = ids;
  sim.values = DenseMatrix(ids.size(), ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) sim.values(i, i) = 1.0;
  return sim;
}

std::string_view format_name(AssocFormat f) {
  return f == AssocFormat::matrix ? "matrix" : "triples";
}

// Bundle for commands that score but never touch similarities; absent
// similarity files are stood in by the identity matrix.
DatasetBundle bundle_with_placeholder_sims(AssociationMatrix assoc) {
  DatasetBundle bundle;
  bundle.drug_sim = identity_similarity(assoc.drug_ids);
  bundle.disease_sim = identity_similarity(assoc.disease_ids);
  bundle.associations = std::move(assoc);
  return bundle;
}

std::string render_loss_log(std::span<const EpochLog> log) {
  std::string tsv =
      "epoch\tloss\tloss_prediction\tloss_drug_side\tloss_disease_side\n";
  for (const EpochLog& e : log) {
    tsv += std::to_string(e.epoch);
    tsv += '\t';
    tsv += format_double(e.total);
    tsv += '\t';
    tsv += format_double(e.prediction);
    tsv += '\t';
    tsv += format_double(e.drug_side);
    tsv += '\t';
    tsv += format_double(e.disease_side);
    tsv += '\n';
  }
  return tsv;
}

}  // namespace

AssocFormat assoc_format_from_string(std::string_view s) {
  if (s == "matrix") return AssocFormat::matrix;
  if (s == "triples") return AssocFormat::triples;
  throw std::invalid_argument("unknown association format '" +
                              std::string(s) +
                              "' (expected matrix or triples)");
}

int run_validate(const ValidateOptions& opts, std::ostream& out) {
  std::vector<std::string> errors;
  auto attempt = [&errors](const std::function<void()>& step) {
    try {
      step();
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  };

  std::optional<AssociationMatrix> assoc;
  std::optional<SimilarityMatrix> drug_sim, disease_sim;
  attempt([&] {
    assoc = load_association_matrix(opts.assoc, opts.format);
    out << "drugs: " << assoc->n_drugs() << "\n";
    out << "diseases: " << assoc->n_diseases() << "\n";
    out << "positive associations: " << assoc->count_positives() << "\n";
  });
  attempt([&] {
    drug_sim = load_similarity_matrix(opts.drug_sim);
    out << "drug similarities: ok (" << drug_sim->size() << " ids)\n";
  });
  attempt([&] {
    disease_sim = load_similarity_matrix(opts.disease_sim);
    out << "disease similarities: ok (" << disease_sim->size() << " ids)\n";
  });
  if (assoc && drug_sim && disease_sim) {
    attempt([&] {
      DatasetBundle bundle{std::move(*assoc), std::move(*drug_sim),
                           std::move(*disease_sim)};
      bundle.validate();
      out << "bundle: ok\n";
    });
  }

  for (const std::string& e : errors) out << "error: " << e << "\n";
  return errors.empty() ? 0 : 1;
}

int run_train(const TrainOptions& opts, std::ostream& out) {
  ManifestWriter manifest("train");

  TrainConfig cfg;
  if (!opts.config.empty())
    cfg = parse_train_config_json(read_text_file(opts.config.string()), cfg);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.variant) cfg.variant = variant_from_string(*opts.variant);
  if (opts.latent_dim) cfg.latent_dim = *opts.latent_dim;
  if (opts.ratio) cfg.split_ratio = *opts.ratio;
  if (opts.negatives) cfg.negatives_per_positive = *opts.negatives;
  if (opts.epochs) cfg.epochs = *opts.epochs;
  if (opts.alpha) cfg.alpha = *opts.alpha;
  if (opts.beta) cfg.beta = *opts.beta;
  if (opts.learning_rate) cfg.learning_rate = *opts.learning_rate;
  if (opts.batch_size) cfg.batch_size = *opts.batch_size;
  if (opts.neighbor_k) cfg.neighbor_k = *opts.neighbor_k;
  cfg.validate();

  bool needs_sims = cfg.variant == Variant::nmf;
  if (needs_sims && (opts.drug_sim.empty() || opts.disease_sim.empty()))
    throw std::runtime_error(
        "variant nmf requires --drug-sim and --disease-sim");

  AssociationMatrix assoc = load_association_matrix(opts.assoc, opts.format);
  manifest.add_input(opts.assoc);
  DatasetBundle bundle;
  if (!opts.drug_sim.empty() && !opts.disease_sim.empty()) {
    bundle.associations = std::move(assoc);
    bundle.drug_sim = load_similarity_matrix(opts.drug_sim);
    bundle.disease_sim = load_similarity_matrix(opts.disease_sim);
    manifest.add_input(opts.drug_sim);
    manifest.add_input(opts.disease_sim);
  } else {
    bundle = bundle_with_placeholder_sims(std::move(assoc));
  }
  bundle.validate();
  if (!opts.config.empty()) manifest.add_input(opts.config);

  json args;
  args["assoc"] = opts.assoc.string();
  args["drug_sim"] = opts.drug_sim.string();
  args["disease_sim"] = opts.disease_sim.string();
  args["format"] = std::string(format_name(opts.format));
  args["out"] = opts.out_dir.string();
  args["train_config"] = json::parse(train_config_json(cfg));
  manifest.set_config(std::move(args));

  DataSplit split =
      split_associations(bundle.associations, cfg.split_ratio, cfg.seed);
  FitResult result = fit(bundle, split, cfg);

  std::filesystem::create_directories(opts.out_dir);
  path checkpoint_path = opts.out_dir / "checkpoint.json";
  save_checkpoint(result.state, cfg, result.log, checkpoint_path);
  path loss_log_path = opts.out_dir / "loss_log.tsv";
  write_text_file(loss_log_path.string(), render_loss_log(result.log));
  manifest.add_output(checkpoint_path);
  manifest.add_output(loss_log_path);
  manifest.write(opts.out_dir);

  double final_loss = result.log.empty() ? 0.0 : result.log.back().total;
  out << "train: variant=" << to_string(cfg.variant)
      << " epochs=" << cfg.epochs
      << " train_positives=" << split.train_positives.size()
      << " final_loss=" << format_double(final_loss) << "\n"
      << "checkpoint: " << checkpoint_path.string() << "\n";
  return 0;
}

int run_evaluate(const EvaluateOptions& opts, std::ostream& out) {
  ManifestWriter manifest("evaluate");
  LoadedCheckpoint lc = load_checkpoint(opts.checkpoint);
  manifest.add_input(opts.checkpoint);

  AssociationMatrix assoc = load_association_matrix(opts.assoc, opts.format);
  manifest.add_input(opts.assoc);
  if (assoc.n_drugs() != lc.state.n_drugs ||
      assoc.n_diseases() != lc.state.n_diseases)
    throw std::runtime_error(
        "association matrix is " + std::to_string(assoc.n_drugs()) + "x" +
        std::to_string(assoc.n_diseases()) + " but the checkpoint expects " +
        std::to_string(lc.state.n_drugs) + "x" +
        std::to_string(lc.state.n_diseases));

  double ratio = opts.ratio.value_or(lc.config.split_ratio);
  std::uint64_t seed = opts.seed.value_or(lc.config.seed);
  DataSplit split = split_associations(assoc, ratio, seed);
  DatasetBundle bundle = bundle_with_placeholder_sims(std::move(assoc));
  MetricsReport report = evaluate_model(lc.state, bundle, split);

  json config;
  config["checkpoint"] = opts.checkpoint.string();
  config["assoc"] = opts.assoc.string();
  config["format"] = std::string(format_name(opts.format));
  config["split_ratio"] = ratio;
  config["seed"] = seed;
  config["variant"] = std::string(to_string(lc.config.variant));
  manifest.set_config(std::move(config));

  std::filesystem::create_directories(opts.out_dir);
  json metrics;
  metrics["auc"] = report.auc;
  metrics["aupr"] = report.aupr;
  metrics["n_pos"] = report.n_pos;
  metrics["n_neg"] = report.n_neg;
  metrics["variant"] = std::string(to_string(lc.config.variant));
  metrics["latent_dim"] = lc.config.latent_dim;
  metrics["seed"] = seed;
  metrics["split_ratio"] = ratio;
  path metrics_path = opts.out_dir / "metrics.json";
  write_text_file(metrics_path.string(), metrics.dump(2) + "\n");

  std::string roc_tsv = "fpr\ttpr\n";
  for (const RocPoint& p : report.roc)
    roc_tsv +=
        format_double(p.fpr) + "\t" + format_double(p.tpr) + "\n";
  path roc_path = opts.out_dir / "roc.tsv";
  write_text_file(roc_path.string(), roc_tsv);

  std::string pr_tsv = "recall\tprecision\n";
  for (const PrPoint& p : report.pr)
    pr_tsv +=
        format_double(p.recall) + "\t" + format_double(p.precision) + "\n";
  path pr_path = opts.out_dir / "pr.tsv";
  write_text_file(pr_path.string(), pr_tsv);

  manifest.add_output(metrics_path);
  manifest.add_output(roc_path);
  manifest.add_output(pr_path);
  manifest.write(opts.out_dir);

  out << "evaluate: auc=" << format_double(report.auc)
      << " aupr=" << format_double(report.aupr)
      << " n_pos=" << report.n_pos << " n_neg=" << report.n_neg << "\n";
  return 0;
}

int run_predict(const PredictOptions& opts, std::ostream& out) {
  ManifestWriter manifest("predict");
  LoadedCheckpoint lc = load_checkpoint(opts.checkpoint);
  manifest.add_input(opts.checkpoint);
  AssociationMatrix assoc = load_association_matrix(opts.assoc, opts.format);
  manifest.add_input(opts.assoc);
  DatasetBundle bundle = bundle_with_placeholder_sims(std::move(assoc));

  std::vector<RankedCandidate> ranked =
      rank_candidates(lc.state, bundle, opts.drug_id, opts.top_n,
                      opts.exclude_known);

  std::string table = "rank\tdisease_id\tscore\tknown\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    table += std::to_string(i + 1);
    table += '\t';
    table += ranked[i].disease_id;
    table += '\t';
    table += format_double(ranked[i].score);
    table += '\t';
    table += ranked[i].known ? '1' : '0';
    table += '\n';
  }
  out << table;

  if (opts.out_dir) {
    json config;
    config["checkpoint"] = opts.checkpoint.string();
    config["assoc"] = opts.assoc.string();
    config["drug"] = opts.drug_id;
    config["top_n"] = opts.top_n;
    config["exclude_known"] = opts.exclude_known;
    manifest.set_config(std::move(config));
    std::filesystem::create_directories(*opts.out_dir);
    path pred_path = *opts.out_dir / "predictions.tsv";
    write_text_file(pred_path.string(), table);
    manifest.add_output(pred_path);
    manifest.write(*opts.out_dir);
  }
  return 0;
}

int run_synth(const SynthOptions& opts, std::ostream& out) {
  ManifestWriter manifest("synth");
  SyntheticSpec spec;
  spec.n_drugs = opts.n_drugs;
  spec.n_diseases = opts.n_diseases;
  spec.latent_dim = opts.latent_dim;
  spec.density = opts.density;
  spec.noise = opts.noise;
  spec.seed = opts.seed;

  SyntheticData data = generate_synthetic(spec);
  write_synthetic_dataset(data, spec, opts.out_dir);

  json config;
  config["n_drugs"] = spec.n_drugs;
  config["n_diseases"] = spec.n_diseases;
  config["latent_dim"] = spec.latent_dim;
  config["density"] = spec.density;
  config["noise"] = spec.noise;
  config["seed"] = spec.seed;
  config["out"] = opts.out_dir.string();
  manifest.set_config(std::move(config));
  for (const char* name :
       {"association.tsv", "drug_sim.tsv", "disease_sim.tsv",
        "provenance.json"})
    manifest.add_output(opts.out_dir / name);
  manifest.write(opts.out_dir);

  out << "synth: wrote " << opts.out_dir.string() << " ("
      << spec.n_drugs << " drugs x " << spec.n_diseases << " diseases, "
      << data.bundle.associations.count_positives() << " positives)\n";
  return 0;
}

}  // namespace nmf::cli
