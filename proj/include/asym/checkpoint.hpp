#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "asym/error.hpp"
#include "asym/features.hpp"
#include "asym/gcn.hpp"

// Checkpoint container (JSON, version 1). Top-level fields, in order:
//   format         "asym-gcn-checkpoint"
//   version        1
//   feature_schema feature column contract the model was trained on
//   features       column names
//   input_dim, hidden_dim
//   config         TrainConfig echo (epochs, lr, batch_size, hidden,
//                  validation_every, validation_fraction, adam_beta1,
//                  adam_beta2, adam_eps, seed)
//   best_epoch, best_validation_auc
//   params         w1 (input_dim rows of hidden_dim values), b1, w2, b2
//   history        epochs: [[epoch, loss], ...], validations: [[epoch, auc], ...]
// Reals are written in shortest round-trip form, so save/load is exact.

namespace asym {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  GcnModel model;
  TrainConfig config;
  int best_epoch = 0;
  double best_auc = std::numeric_limits<double>::quiet_NaN();
  TrainHistory history;
};

namespace detail {

inline nlohmann::ordered_json real_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json();
}

inline double real_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json checkpoint_json(const Checkpoint& ck) {
  const auto& m = ck.model;
  nlohmann::ordered_json j;
  j["format"] = "asym-gcn-checkpoint";
  j["version"] = kCheckpointVersion;
  j["feature_schema"] = kFeatureSchema;
  j["features"] = kFeatureNames;
  j["input_dim"] = m.input_dim();
  j["hidden_dim"] = m.hidden_dim();
  const auto& c = ck.config;
  j["config"] = {{"epochs", c.epochs},
                 {"lr", c.lr},
                 {"batch_size", c.batch_size},
                 {"hidden", c.hidden},
                 {"validation_every", c.validation_every},
                 {"validation_fraction", c.validation_fraction},
                 {"adam_beta1", c.adam_beta1},
                 {"adam_beta2", c.adam_beta2},
                 {"adam_eps", c.adam_eps},
                 {"seed", c.seed}};
  j["best_epoch"] = ck.best_epoch;
  j["best_validation_auc"] = detail::real_or_null(ck.best_auc);
  auto& p = j["params"];
  p["w1"] = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.w1.cols()));
    for (Eigen::Index c2 = 0; c2 < m.w1.cols(); ++c2) row[static_cast<std::size_t>(c2)] = m.w1(r, c2);
    p["w1"].push_back(row);
  }
  p["b1"] = std::vector<double>(m.b1.data(), m.b1.data() + m.b1.size());
  p["w2"] = std::vector<double>(m.w2.data(), m.w2.data() + m.w2.size());
  p["b2"] = m.b2;
  auto& h = j["history"];
  h["epochs"] = nlohmann::ordered_json::array();
  for (const auto& e : ck.history.epochs) h["epochs"].push_back({e.epoch, detail::real_or_null(e.loss)});
  h["validations"] = nlohmann::ordered_json::array();
  for (const auto& v : ck.history.validations) {
    h["validations"].push_back({v.epoch, detail::real_or_null(v.auc)});
  }
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "asym-gcn-checkpoint") {
    throw FormatError("not a GCN checkpoint");
  }
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
  }
  if (j.at("feature_schema").get<std::string>() != kFeatureSchema) {
    throw FormatError("checkpoint feature schema '" + j.at("feature_schema").get<std::string>() +
                      "' does not match this build ('" + std::string(kFeatureSchema) + "')");
  }
  Checkpoint ck;
  const auto input = j.at("input_dim").get<Eigen::Index>();
  const auto hidden = j.at("hidden_dim").get<Eigen::Index>();
  if (input != kFeatureCount) throw FormatError("checkpoint input_dim does not match the feature count");
  const auto& c = j.at("config");
  ck.config.epochs = c.at("epochs").get<int>();
  ck.config.lr = c.at("lr").get<double>();
  ck.config.batch_size = c.at("batch_size").get<int>();
  ck.config.hidden = c.at("hidden").get<int>();
  ck.config.validation_every = c.at("validation_every").get<int>();
  ck.config.validation_fraction = c.at("validation_fraction").get<double>();
  ck.config.adam_beta1 = c.at("adam_beta1").get<double>();
  ck.config.adam_beta2 = c.at("adam_beta2").get<double>();
  ck.config.adam_eps = c.at("adam_eps").get<double>();
  ck.config.seed = c.at("seed").get<std::uint64_t>();
  ck.best_epoch = j.at("best_epoch").get<int>();
  ck.best_auc = detail::real_from(j.at("best_validation_auc"));

  ck.model = GcnModel::zeros(input, hidden);
  const auto& p = j.at("params");
  const auto& w1 = p.at("w1");
  if (static_cast<Eigen::Index>(w1.size()) != input) throw FormatError("checkpoint w1 has wrong row count");
  for (Eigen::Index r = 0; r < input; ++r) {
    const auto row = w1.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != hidden) throw FormatError("checkpoint w1 has wrong width");
    for (Eigen::Index c2 = 0; c2 < hidden; ++c2) ck.model.w1(r, c2) = row[static_cast<std::size_t>(c2)];
  }
  const auto b1 = p.at("b1").get<std::vector<double>>();
  const auto w2 = p.at("w2").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(b1.size()) != hidden || static_cast<Eigen::Index>(w2.size()) != hidden) {
    throw FormatError("checkpoint bias/output shapes do not match hidden_dim");
  }
  for (Eigen::Index i = 0; i < hidden; ++i) {
    ck.model.b1(i) = b1[static_cast<std::size_t>(i)];
    ck.model.w2(i) = w2[static_cast<std::size_t>(i)];
  }
  ck.model.b2 = p.at("b2").get<double>();
  if (!ck.model.all_finite()) throw FormatError("checkpoint parameters are not finite");

  for (const auto& e : j.at("history").at("epochs")) {
    ck.history.epochs.push_back({e.at(0).get<int>(), detail::real_from(e.at(1))});
  }
  for (const auto& v : j.at("history").at("validations")) {
    ck.history.validations.push_back({v.at(0).get<int>(), detail::real_from(v.at(1))});
  }
  return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << checkpoint_json(ck).dump() << '\n';
  if (!out) throw FormatError("write failed for " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  try {
    return checkpoint_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline Checkpoint make_checkpoint(const TrainResult& r, const TrainConfig& cfg) {
  return {r.model, cfg, r.best_epoch, r.best_auc, r.history};
}

}  // namespace asym
