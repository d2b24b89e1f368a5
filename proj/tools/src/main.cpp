// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nmfcli/commands.hpp"

namespace {

using nmf::cli::assoc_format_from_string;

struct CommonData {
  std::string assoc;
  std::string format = "matrix";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Drug-disease association prediction with metric latent embeddings"};
  app.require_subcommand(1);

  // --- validate -----------------------------------------------------------
  CommonData vdata;
  std::string v_drug_sim, v_disease_sim;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check dataset files against every format invariant");
  validate->add_option("--assoc", vdata.assoc, "Association matrix file")
      ->required();
  validate->add_option("--drug-sim", v_drug_sim, "Drug similarity file")
      ->required();
  validate
      ->add_option("--disease-sim", v_disease_sim, "Disease similarity file")
      ->required();
  validate->add_option("--format", vdata.format,
                       "Association file format: matrix|triples");

  // --- train ---------------------------------------------------------------
  CommonData tdata;
  std::string t_drug_sim, t_disease_sim, t_config, t_out;
  std::optional<std::uint64_t> t_seed;
  std::optional<std::string> t_variant;
  std::optional<std::size_t> t_latent, t_neg, t_epochs, t_batch, t_nk;
  std::optional<double> t_ratio, t_alpha, t_beta, t_lr;
  CLI::App* train = app.add_subcommand(
      "train", "Fit a model and write checkpoint, loss log and manifest");
  train->add_option("--assoc", tdata.assoc, "Association matrix file")
      ->required();
  train->add_option("--drug-sim", t_drug_sim,
                    "Drug similarity file (required for variant nmf)");
  train->add_option("--disease-sim", t_disease_sim,
                    "Disease similarity file (required for variant nmf)");
  train->add_option("--format", tdata.format,
                    "Association file format: matrix|triples");
  train->add_option("--config", t_config, "JSON config file");
  train->add_option("--out", t_out, "Output directory")->required();
  train->add_option("--seed", t_seed, "RNG seed");
  train->add_option("--variant", t_variant, "Model variant: nmf|nmf-oh|mf");
  train->add_option("--latent-dim", t_latent, "Latent dimension");
  train->add_option("--ratio", t_ratio, "Train fraction of the positives");
  train->add_option("--negatives", t_neg, "Negatives sampled per positive");
  train->add_option("--epochs", t_epochs, "Training epochs");
  train->add_option("--alpha", t_alpha, "Drug side-loss weight");
  train->add_option("--beta", t_beta, "Disease side-loss weight");
  train->add_option("--learning-rate", t_lr, "Adam learning rate");
  train->add_option("--batch-size", t_batch, "Positives per minibatch");
  train->add_option("--neighbor-k", t_nk,
                    "Neighbors kept per entity (0 keeps all)");

  // --- evaluate -------------------------------------------------------------
  CommonData edata;
  std::string e_checkpoint, e_out;
  std::optional<double> e_ratio;
  std::optional<std::uint64_t> e_seed;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score test pairs from a checkpoint and write metrics");
  evaluate->add_option("--checkpoint", e_checkpoint, "checkpoint.json path")
      ->required();
  evaluate->add_option("--assoc", edata.assoc, "Association matrix file")
      ->required();
  evaluate->add_option("--format", edata.format,
                       "Association file format: matrix|triples");
  evaluate->add_option("--out", e_out, "Output directory")->required();
  evaluate->add_option("--ratio", e_ratio,
                       "Override the recorded split ratio");
  evaluate->add_option("--seed", e_seed, "Override the recorded split seed");

  // --- predict ---------------------------------------------------------------
  CommonData pdata;
  std::string p_checkpoint, p_drug, p_out;
  std::size_t p_top_n = 10;
  bool p_exclude_known = false;
  CLI::App* predict = app.add_subcommand(
      "predict", "Rank candidate diseases for one drug");
  predict->add_option("--checkpoint", p_checkpoint, "checkpoint.json path")
      ->required();
  predict->add_option("--assoc", pdata.assoc, "Association matrix file")
      ->required();
  predict->add_option("--format", pdata.format,
                      "Association file format: matrix|triples");
  predict->add_option("--drug", p_drug, "Drug id to rank diseases for")
      ->required();
  predict->add_option("--top-n", p_top_n, "Number of candidates to keep");
  predict->add_flag("--exclude-known", p_exclude_known,
                    "Drop already-known associations from the ranking");
  predict->add_option("--out", p_out,
                      "Optional output directory for predictions.tsv");

  // --- synth -----------------------------------------------------------------
  std::string s_out;
  std::size_t s_drugs = 50, s_diseases = 40, s_latent = 8;
  double s_density = 0.05, s_noise = 0.0;
  std::uint64_t s_seed = 1;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic dataset with planted structure");
  synth->add_option("--out", s_out, "Output directory")->required();
  synth->add_option("--drugs", s_drugs, "Number of drugs");
  synth->add_option("--diseases", s_diseases, "Number of diseases");
  synth->add_option("--latent-dim", s_latent, "Planted latent dimension");
  synth->add_option("--density", s_density, "Fraction of positive cells");
  synth->add_option("--noise", s_noise, "Fraction of cells flipped");
  synth->add_option("--seed", s_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate->parsed()) {
      nmf::cli::ValidateOptions opts;
      opts.assoc = vdata.assoc;
      opts.drug_sim = v_drug_sim;
      opts.disease_sim = v_disease_sim;
      opts.format = assoc_format_from_string(vdata.format);
      return nmf::cli::run_validate(opts, std::cout);
    }
    if (train->parsed()) {
      nmf::cli::TrainOptions opts;
      opts.assoc = tdata.assoc;
      opts.drug_sim = t_drug_sim;
      opts.disease_sim = t_disease_sim;
      opts.format = assoc_format_from_string(tdata.format);
      opts.config = t_config;
      opts.out_dir = t_out;
      opts.seed = t_seed;
      opts.variant = t_variant;
      opts.latent_dim = t_latent;
      opts.ratio = t_ratio;
      opts.negatives = t_neg;
      opts.epochs = t_epochs;
      opts.alpha = t_alpha;
      opts.beta = t_beta;
      opts.learning_rate = t_lr;
      opts.batch_size = t_batch;
      opts.neighbor_k = t_nk;
      return nmf::cli::run_train(opts, std::cout);
    }
    if (evaluate->parsed()) {
      nmf::cli::EvaluateOptions opts;
      opts.checkpoint = e_checkpoint;
      opts.assoc = edata.assoc;
      opts.format = assoc_format_from_string(edata.format);
      opts.out_dir = e_out;
      opts.ratio = e_ratio;
      opts.seed = e_seed;
      return nmf::cli::run_evaluate(opts, std::cout);
    }
    if (predict->parsed()) {
      nmf::cli::PredictOptions opts;
      opts.checkpoint = p_checkpoint;
      opts.assoc = pdata.assoc;
      opts.format = assoc_format_from_string(pdata.format);
      opts.drug_id = p_drug;
      opts.top_n = p_top_n;
      opts.exclude_known = p_exclude_known;
      if (!p_out.empty()) opts.out_dir = p_out;
      return nmf::cli::run_predict(opts, std::cout);
    }
    if (synth->parsed()) {
      nmf::cli::SynthOptions opts;
      opts.out_dir = s_out;
      opts.n_drugs = s_drugs;
      opts.n_diseases = s_diseases;
      opts.latent_dim = s_latent;
      opts.density = s_density;
      opts.noise = s_noise;
      opts.seed = s_seed;
      return nmf::cli::run_synth(opts, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
