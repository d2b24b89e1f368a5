// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint layout (JSON, alphabetical keys, parameters kept in the
// canonical named_params order):
//
// {
//   "config": { ...TrainConfig fields... },
//   "format": "nmf/checkpoint",
//   "n_diseases": N, "n_drugs": M,
//   "parameters": [ {"cols":c,"name":"...","rows":r,"values":[...]}, ... ],
//   "training_log": [ {"disease_side":..,"drug_side":..,"epoch":..,
//                      "prediction":..,"total":..}, ... ],
//   "version": 1
// }
//
// Doubles are emitted in shortest round-trip form, so save -> load is
// bit-exact and identical runs produce identical bytes.

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "nmf/textio.hpp"
#include "nmf/trainer.hpp"

namespace nmf {
namespace {

using json = nlohmann::json;

constexpr const char* kFormat = "nmf/checkpoint";
constexpr int kVersion = 1;

[[noreturn]] void bad_checkpoint(const std::filesystem::path& path,
                                 const std::string& msg) {
  throw std::runtime_error(path.string() + ": invalid checkpoint: " + msg);
}

}  // namespace

void save_checkpoint(const ModelState& state, const TrainConfig& cfg,
                     std::span<const EpochLog> log,
                     const std::filesystem::path& path) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["config"] = json::parse(train_config_json(cfg));
  j["n_drugs"] = state.n_drugs;
  j["n_diseases"] = state.n_diseases;

  json params = json::array();
  for (const auto& [name, p] : state.named_params()) {
    json entry;
    entry["name"] = name;
    entry["rows"] = p->rows();
    entry["cols"] = p->cols();
    json values = json::array();
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      double v = p->value.data()[i];
      if (!std::isfinite(v))
        throw std::runtime_error(
            "save_checkpoint: non-finite value in " + name);
      values.push_back(v);
    }
    entry["values"] = std::move(values);
    params.push_back(std::move(entry));
  }
  j["parameters"] = std::move(params);

  json jlog = json::array();
  for (const EpochLog& e : log) {
    json entry;
    entry["epoch"] = e.epoch;
    entry["total"] = e.total;
    entry["prediction"] = e.prediction;
    entry["drug_side"] = e.drug_side;
    entry["disease_side"] = e.disease_side;
    jlog.push_back(std::move(entry));
  }
  j["training_log"] = std::move(jlog);

  write_text_file(path.string(), j.dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 std::optional<Variant> expect_variant) {
  json j;
  try {
    j = json::parse(read_text_file(path.string()));
  } catch (const std::exception& e) {
    bad_checkpoint(path, e.what());
  }

  LoadedCheckpoint out;
  try {
    if (j.at("format").get<std::string>() != kFormat)
      bad_checkpoint(path, "unrecognized format field");
    if (j.at("version").get<int>() != kVersion)
      bad_checkpoint(path, "unsupported version " +
                               j.at("version").dump());
    out.config = parse_train_config_json(j.at("config").dump(),
                                         TrainConfig{});
    std::size_t n_drugs = j.at("n_drugs").get<std::size_t>();
    std::size_t n_diseases = j.at("n_diseases").get<std::size_t>();

    if (expect_variant && *expect_variant != out.config.variant)
      throw std::runtime_error(
          path.string() + ": checkpoint variant '" +
          std::string(to_string(out.config.variant)) +
          "' does not match requested variant '" +
          std::string(to_string(*expect_variant)) + "'");

    out.state = ModelState::with_shapes(out.config.variant,
                                        out.config.latent_dim, n_drugs,
                                        n_diseases);
    auto expected = out.state.named_params();
    const json& params = j.at("parameters");
    if (!params.is_array() || params.size() != expected.size())
      bad_checkpoint(path,
                     "expected " + std::to_string(expected.size()) +
                         " parameter tensors for variant '" +
                         std::string(to_string(out.config.variant)) + "'");
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const json& entry = params.at(i);
      auto& [name, tensor] = expected[i];
      if (entry.at("name").get<std::string>() != name)
        bad_checkpoint(path, "parameter " + std::to_string(i) +
                                 " should be '" + name + "', found '" +
                                 entry.at("name").get<std::string>() + "'");
      std::size_t rows = entry.at("rows").get<std::size_t>();
      std::size_t cols = entry.at("cols").get<std::size_t>();
      if (rows != tensor->rows() || cols != tensor->cols())
        bad_checkpoint(path, "parameter '" + name + "' has shape " +
                                 std::to_string(rows) + "x" +
                                 std::to_string(cols) + ", expected " +
                                 std::to_string(tensor->rows()) + "x" +
                                 std::to_string(tensor->cols()));
      const json& values = entry.at("values");
      if (!values.is_array() || values.size() != tensor->value.size())
        bad_checkpoint(path, "parameter '" + name +
                                 "' value count mismatch");
      for (std::size_t v = 0; v < values.size(); ++v) {
        double x = values.at(v).get<double>();
        if (!std::isfinite(x))
          bad_checkpoint(path, "non-finite value in '" + name + "'");
        tensor->value.data()[v] = x;
      }
    }

    for (const json& entry : j.at("training_log")) {
      EpochLog e;
      e.epoch = entry.at("epoch").get<std::size_t>();
      e.total = entry.at("total").get<double>();
      e.prediction = entry.at("prediction").get<double>();
      e.drug_side = entry.at("drug_side").get<double>();
      e.disease_side = entry.at("disease_side").get<double>();
      out.log.push_back(e);
    }
  } catch (const json::exception& e) {
    bad_checkpoint(path, e.what());
  }
  return out;
}

}  // namespace nmf
