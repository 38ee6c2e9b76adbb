#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "rlab/adam.hpp"
#include "rlab/datasets.hpp"
#include "rlab/losses.hpp"

// Declarative experiment files: a single JSON document with a versioned
// schema, validated strictly (unknown keys are rejected by name) and mapped
// onto TrainConfig.

namespace rlab {

enum class LossFamily { Lkgan, Renyigan, DcganBaseline };

inline std::string family_name(LossFamily f) {
  switch (f) {
    case LossFamily::Lkgan: return "lkgan";
    case LossFamily::Renyigan: return "renyigan";
    case LossFamily::DcganBaseline: return "dcgan-baseline";
  }
  return "dcgan-baseline";
}

struct TrainConfig {
  LossFamily family = LossFamily::DcganBaseline;
  std::optional<LkganParams> lkgan;
  std::optional<RenyiganParams> renyigan;
  PenaltyConfig penalty;
  int epochs = 1;
  int batch_size = 64;
  DatasetSpec dataset;
  int latent_dim = 8;
  AdamConfig optimizer;
  std::uint64_t seed = 0;
  int disc_steps_per_gen_step = 1;
  int hidden_width = 64;
  int hidden_layers = 2;
  int pool_size = 8192;
  int fid_samples = 2048;
  bool debug_fake_equals_real = false;  // test hook, not part of the schema

  void validate() const {
    if (epochs < 1) throw ConfigInvalid("epochs must be >= 1");
    if (batch_size < 1) throw ConfigInvalid("batch_size must be >= 1");
    if (latent_dim < 1) throw ConfigInvalid("latent_dim must be >= 1");
    if (disc_steps_per_gen_step < 1)
      throw ConfigInvalid("disc_steps_per_gen_step must be >= 1");
    if (hidden_width < 1 || hidden_layers < 1)
      throw ConfigInvalid("network width/depth must be >= 1");
    if (pool_size < batch_size)
      throw ConfigInvalid("pool_size must be >= batch_size");
    if (fid_samples < 2) throw ConfigInvalid("fid_samples must be >= 2");
    dataset.validate();
    penalty.validate();
    if (family == LossFamily::Lkgan) {
      if (!lkgan) throw ConfigInvalid("lkgan family needs the lkgan block");
      lkgan->validate();
    }
    if (family == LossFamily::Renyigan) {
      if (!renyigan)
        throw ConfigInvalid("renyigan family needs the renyigan block");
      renyigan->validate();
    }
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, unused] : obj.items()) {
    (void)unused;
    if (!allowed.contains(key))
      throw ConfigInvalid("unknown key '" + key + "' in " + where);
  }
}

inline DatasetSpec dataset_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"kind", "modes", "radius", "mode_std", "rows", "cols",
                       "mean", "cov_diag"},
                      "dataset");
  DatasetSpec spec;
  const std::string kind = j.value("kind", "gaussian-mixture-ring");
  if (kind == "gaussian-mixture-ring") {
    spec.kind = DatasetKind::GaussianRing;
  } else if (kind == "grid-mixture") {
    spec.kind = DatasetKind::GridMixture;
  } else if (kind == "single-gaussian") {
    spec.kind = DatasetKind::SingleGaussian;
  } else {
    throw ConfigInvalid("unknown dataset kind '" + kind + "'");
  }
  spec.n_modes = j.value("modes", spec.n_modes);
  spec.radius = j.value("radius", spec.radius);
  spec.mode_std = j.value("mode_std", spec.mode_std);
  spec.rows = j.value("rows", spec.rows);
  spec.cols = j.value("cols", spec.cols);
  if (j.contains("mean")) {
    const auto m = j.at("mean").get<std::vector<double>>();
    if (m.size() != 2) throw ConfigInvalid("dataset mean must have 2 entries");
    spec.mean = {m[0], m[1]};
  }
  if (j.contains("cov_diag")) {
    const auto c = j.at("cov_diag").get<std::vector<double>>();
    if (c.size() != 2)
      throw ConfigInvalid("dataset cov_diag must have 2 entries");
    spec.cov_diag = {c[0], c[1]};
  }
  return spec;
}

inline nlohmann::json dataset_to_json(const DatasetSpec& s) {
  nlohmann::json j;
  switch (s.kind) {
    case DatasetKind::GaussianRing:
      j["kind"] = "gaussian-mixture-ring";
      j["modes"] = s.n_modes;
      j["radius"] = s.radius;
      break;
    case DatasetKind::GridMixture:
      j["kind"] = "grid-mixture";
      j["rows"] = s.rows;
      j["cols"] = s.cols;
      break;
    case DatasetKind::SingleGaussian:
      j["kind"] = "single-gaussian";
      j["mean"] = s.mean;
      j["cov_diag"] = s.cov_diag;
      break;
  }
  j["mode_std"] = s.mode_std;
  return j;
}

}  // namespace detail

inline TrainConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigInvalid("experiment file must be an object");
  detail::reject_unknown_keys(
      j,
      {"schema", "family", "seed", "epochs", "batch_size", "latent_dim",
       "hidden_width", "hidden_layers", "pool_size", "fid_samples",
       "disc_steps_per_gen_step", "dataset", "optimizer", "penalty", "lkgan",
       "renyigan"},
      "experiment file");
  if (!j.contains("schema") || j.at("schema").get<int>() != 1)
    throw ConfigInvalid("experiment file needs \"schema\": 1");
  if (!j.contains("family")) throw ConfigInvalid("missing key 'family'");

  TrainConfig cfg;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "lkgan") {
    cfg.family = LossFamily::Lkgan;
  } else if (fam == "renyigan") {
    cfg.family = LossFamily::Renyigan;
  } else if (fam == "dcgan-baseline") {
    cfg.family = LossFamily::DcganBaseline;
  } else {
    throw ConfigInvalid("unknown family '" + fam + "'");
  }

  cfg.seed = j.value("seed", cfg.seed);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.latent_dim = j.value("latent_dim", cfg.latent_dim);
  cfg.hidden_width = j.value("hidden_width", cfg.hidden_width);
  cfg.hidden_layers = j.value("hidden_layers", cfg.hidden_layers);
  cfg.pool_size = j.value("pool_size", cfg.pool_size);
  cfg.fid_samples = j.value("fid_samples", cfg.fid_samples);
  cfg.disc_steps_per_gen_step =
      j.value("disc_steps_per_gen_step", cfg.disc_steps_per_gen_step);

  if (j.contains("dataset"))
    cfg.dataset = detail::dataset_from_json(j.at("dataset"));

  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    detail::reject_unknown_keys(
        o, {"learning_rate", "beta1", "beta2", "epsilon"}, "optimizer");
    cfg.optimizer.learning_rate =
        o.value("learning_rate", cfg.optimizer.learning_rate);
    cfg.optimizer.beta1 = o.value("beta1", cfg.optimizer.beta1);
    cfg.optimizer.beta2 = o.value("beta2", cfg.optimizer.beta2);
    cfg.optimizer.epsilon = o.value("epsilon", cfg.optimizer.epsilon);
  }

  if (j.contains("penalty")) {
    const auto& p = j.at("penalty");
    detail::reject_unknown_keys(p, {"enabled", "coefficient"}, "penalty");
    cfg.penalty.enabled = p.value("enabled", false);
    cfg.penalty.coefficient = p.value("coefficient", 5.0);
  }

  if (j.contains("lkgan")) {
    const auto& l = j.at("lkgan");
    detail::reject_unknown_keys(l, {"k", "version", "a", "b", "c"}, "lkgan");
    const double k = l.value("k", 2.0);
    LkganParams params;
    if (l.contains("version")) {
      const std::string v = l.at("version").get<std::string>();
      if (v == "v1") {
        params = LkganParams::v1(k);
      } else if (v == "v2") {
        params = LkganParams::v2(k);
      } else if (v == "v3") {
        params = LkganParams::v3(k);
      } else {
        throw ConfigInvalid("unknown lkgan version '" + v + "'");
      }
      if (l.contains("a") || l.contains("b") || l.contains("c"))
        throw ConfigInvalid("lkgan: give either version or explicit a/b/c");
    } else {
      params.k = k;
      params.a = l.value("a", params.a);
      params.b = l.value("b", params.b);
      params.c = l.value("c", params.c);
    }
    cfg.lkgan = params;
  }

  if (j.contains("renyigan")) {
    const auto& r = j.at("renyigan");
    detail::reject_unknown_keys(r, {"alpha", "l1", "schedule"}, "renyigan");
    RenyiganParams params;
    params.l1_normalized = r.value("l1", false);
    if (r.contains("schedule")) {
      const auto s = r.at("schedule").get<std::vector<double>>();
      if (s.size() != 2)
        throw ConfigInvalid("renyigan schedule must be [beta1, beta2]");
      params.schedule = AlphaSchedule{s[0], s[1]};
      if (r.contains("alpha"))
        throw ConfigInvalid("renyigan: give either alpha or schedule");
    } else {
      params.alpha = r.value("alpha", params.alpha);
    }
    cfg.renyigan = params;
  }

  cfg.validate();
  return cfg;
}

inline nlohmann::json config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["schema"] = 1;
  j["family"] = family_name(cfg.family);
  j["seed"] = cfg.seed;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["latent_dim"] = cfg.latent_dim;
  j["hidden_width"] = cfg.hidden_width;
  j["hidden_layers"] = cfg.hidden_layers;
  j["pool_size"] = cfg.pool_size;
  j["fid_samples"] = cfg.fid_samples;
  j["disc_steps_per_gen_step"] = cfg.disc_steps_per_gen_step;
  j["dataset"] = detail::dataset_to_json(cfg.dataset);
  j["optimizer"] = {{"learning_rate", cfg.optimizer.learning_rate},
                    {"beta1", cfg.optimizer.beta1},
                    {"beta2", cfg.optimizer.beta2},
                    {"epsilon", cfg.optimizer.epsilon}};
  j["penalty"] = {{"enabled", cfg.penalty.enabled},
                  {"coefficient", cfg.penalty.coefficient}};
  if (cfg.lkgan) {
    j["lkgan"] = {{"k", cfg.lkgan->k},
                  {"a", cfg.lkgan->a},
                  {"b", cfg.lkgan->b},
                  {"c", cfg.lkgan->c}};
  }
  if (cfg.renyigan) {
    j["renyigan"] = {{"l1", cfg.renyigan->l1_normalized}};
    if (cfg.renyigan->schedule) {
      j["renyigan"]["schedule"] = {cfg.renyigan->schedule->beta1,
                                   cfg.renyigan->schedule->beta2};
    } else {
      j["renyigan"]["alpha"] = cfg.renyigan->alpha;
    }
  }
  return j;
}

inline TrainConfig load_experiment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid("config parse error in " + path.string() + ": " +
                        e.what());
  }
  return config_from_json(j);
}

}  // namespace rlab
