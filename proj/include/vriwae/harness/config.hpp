// Copyright 2026 The vriwae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef VRIWAE_HARNESS_CONFIG_HPP
#define VRIWAE_HARNESS_CONFIG_HPP

#include <vriwae/models/reparam_model.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

/**
 * \file
 * \brief Sweep configuration: a flat JSON document, validated field by field.
 *
 *     {
 *       "name": "fig1", "model": "gaussian",
 *       "d": [10, 100], "eps": [0.2], "alpha": [0.5, 0.9], "N": [2, 4, 8],
 *       "M": 1, "replicates": 2000, "psi": "phi", "k": "random",
 *       "mode": ["rep"], "seed": 1, "output": "out", "emit_analytic": true,
 *       "target": "snr", "point": "random", "T": 1024
 *     }
 */

namespace vriwae::harness {

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? "config: " + what : "config field '" + field + "': " + what),
        field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ModelKind { gaussian, lingauss };

/// Quantity the primary analytic reference of each row describes.
enum class Target { snr, mean };

inline const char* to_string(ModelKind m) noexcept { return m == ModelKind::gaussian ? "gaussian" : "lingauss"; }
inline const char* to_string(Target t) noexcept { return t == Target::snr ? "snr" : "mean"; }

struct SweepConfig {
  std::string name = "sweep";
  ModelKind model = ModelKind::gaussian;
  std::vector<std::size_t> d;
  std::vector<double> eps;
  std::vector<double> alpha;
  std::vector<std::size_t> N;
  std::size_t M = 1;
  std::size_t replicates = 2000;
  std::string psi = "phi";          // coordinate family
  std::optional<std::size_t> k;     // nullopt: drawn from the seed per d
  std::vector<GradMode> modes{GradMode::rep};
  std::uint64_t seed = 0;
  std::string output = ".";
  bool emit_analytic = true;
  Target target = Target::snr;
  // lingauss only
  std::optional<std::uint64_t> dataset_seed;  // defaults to seed
  std::optional<std::size_t> point;           // nullopt: drawn from the seed
  std::size_t T = 1024;
  std::string dataset;                        // optional CSV to load instead of generating

  [[nodiscard]] std::uint64_t effective_dataset_seed() const noexcept { return dataset_seed.value_or(seed); }

  [[nodiscard]] std::size_t grid_size() const noexcept {
    return modes.size() * d.size() * eps.size() * alpha.size() * N.size();
  }

  void validate() const {
    if (name.empty() || name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("name", "must be a nonempty file stem");
    if (d.empty()) throw ConfigError("d", "list must be nonempty");
    for (auto v : d)
      if (v == 0) throw ConfigError("d", "entries must be >= 1");
    if (eps.empty()) throw ConfigError("eps", "list must be nonempty");
    for (double v : eps)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("eps", "entries must be finite and >= 0");
    if (alpha.empty()) throw ConfigError("alpha", "list must be nonempty");
    for (double v : alpha)
      if (!(v >= 0.0 && v < 1.0)) throw ConfigError("alpha", "entries must lie in [0, 1)");
    if (N.empty()) throw ConfigError("N", "list must be nonempty");
    for (auto v : N)
      if (v == 0) throw ConfigError("N", "entries must be >= 1");
    if (M == 0) throw ConfigError("M", "must be >= 1");
    if (replicates < 2) throw ConfigError("replicates", "must be >= 2");
    if (modes.empty()) throw ConfigError("mode", "list must be nonempty");
    const std::set<std::string> families =
        model == ModelKind::gaussian ? std::set<std::string>{"phi", "theta"} : std::set<std::string>{"theta", "a", "b"};
    if (!families.count(psi))
      throw ConfigError("psi", "'" + psi + "' is not a coordinate family of the " + to_string(model) + " model");
    for (auto m : modes)
      if (m == GradMode::drep && psi == "theta") throw ConfigError("mode", "drep requires a phi coordinate, got theta");
    if (k)
      for (auto v : d)
        if (*k >= v) throw ConfigError("k", "coordinate index must be < every d");
    if (model == ModelKind::lingauss) {
      if (T == 0) throw ConfigError("T", "must be >= 1");
      if (point && *point >= T) throw ConfigError("point", "must be < T");
      if (!dataset.empty() && d.size() != 1) throw ConfigError("dataset", "a dataset file requires a single d");
    }
  }
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(key, "missing");
  return j.at(key);
}

template <class T>
T get_unsigned(const nlohmann::json& v, const char* key) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw ConfigError(key, "expected a nonnegative integer");
  return static_cast<T>(v.get<std::uint64_t>());
}

inline double get_real(const nlohmann::json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

inline std::string get_string(const nlohmann::json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

inline const nlohmann::json& get_array(const nlohmann::json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(key, "expected an array");
  return v;
}

inline GradMode parse_mode(const std::string& s) {
  if (s == "rep") return GradMode::rep;
  if (s == "drep") return GradMode::drep;
  throw ConfigError("mode", "unknown mode '" + s + "' (rep|drep)");
}

}  // namespace detail

inline SweepConfig parse_sweep_config(const nlohmann::json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("", "top level must be an object");
  static const std::set<std::string> known{"name", "model", "d", "eps", "alpha", "N", "M", "replicates", "psi", "k",
                                           "mode", "seed", "output", "emit_analytic", "target", "dataset_seed",
                                           "point", "T", "dataset"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError(item.key(), "unknown field");

  SweepConfig cfg;
  if (j.contains("name")) cfg.name = get_string(j["name"], "name");
  const auto model = get_string(require(j, "model"), "model");
  if (model == "gaussian") cfg.model = ModelKind::gaussian;
  else if (model == "lingauss") cfg.model = ModelKind::lingauss;
  else throw ConfigError("model", "unknown model '" + model + "' (gaussian|lingauss)");
  for (const auto& v : get_array(require(j, "d"), "d")) cfg.d.push_back(get_unsigned<std::size_t>(v, "d"));
  for (const auto& v : get_array(require(j, "eps"), "eps")) cfg.eps.push_back(get_real(v, "eps"));
  for (const auto& v : get_array(require(j, "alpha"), "alpha")) cfg.alpha.push_back(get_real(v, "alpha"));
  for (const auto& v : get_array(require(j, "N"), "N")) cfg.N.push_back(get_unsigned<std::size_t>(v, "N"));
  if (j.contains("M")) cfg.M = get_unsigned<std::size_t>(j["M"], "M");
  if (j.contains("replicates")) cfg.replicates = get_unsigned<std::size_t>(j["replicates"], "replicates");
  cfg.psi = cfg.model == ModelKind::gaussian ? "phi" : "b";
  if (j.contains("psi")) cfg.psi = get_string(j["psi"], "psi");
  if (j.contains("k")) {
    const auto& k = j["k"];
    if (k.is_string()) {
      if (k.get<std::string>() != "random") throw ConfigError("k", "expected an index or \"random\"");
    } else {
      cfg.k = get_unsigned<std::size_t>(k, "k");
    }
  }
  if (j.contains("mode")) {
    cfg.modes.clear();
    for (const auto& v : get_array(j["mode"], "mode")) cfg.modes.push_back(parse_mode(get_string(v, "mode")));
  }
  if (j.contains("seed")) cfg.seed = get_unsigned<std::uint64_t>(j["seed"], "seed");
  if (j.contains("output")) cfg.output = get_string(j["output"], "output");
  if (j.contains("emit_analytic")) {
    if (!j["emit_analytic"].is_boolean()) throw ConfigError("emit_analytic", "expected true or false");
    cfg.emit_analytic = j["emit_analytic"].get<bool>();
  }
  if (j.contains("target")) {
    const auto t = get_string(j["target"], "target");
    if (t == "snr") cfg.target = Target::snr;
    else if (t == "mean") cfg.target = Target::mean;
    else throw ConfigError("target", "unknown target '" + t + "' (snr|mean)");
  }
  if (j.contains("dataset_seed")) cfg.dataset_seed = get_unsigned<std::uint64_t>(j["dataset_seed"], "dataset_seed");
  if (j.contains("point")) {
    const auto& p = j["point"];
    if (p.is_string()) {
      if (p.get<std::string>() != "random") throw ConfigError("point", "expected an index or \"random\"");
    } else {
      cfg.point = get_unsigned<std::size_t>(p, "point");
    }
  }
  if (j.contains("T")) cfg.T = get_unsigned<std::size_t>(j["T"], "T");
  if (j.contains("dataset")) cfg.dataset = get_string(j["dataset"], "dataset");
  cfg.validate();
  return cfg;
}

inline SweepConfig parse_sweep_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_sweep_config(j);
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("", "cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_sweep_config(text);
}

inline nlohmann::json to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["model"] = to_string(cfg.model);
  j["d"] = cfg.d;
  j["eps"] = cfg.eps;
  j["alpha"] = cfg.alpha;
  j["N"] = cfg.N;
  j["M"] = cfg.M;
  j["replicates"] = cfg.replicates;
  j["psi"] = cfg.psi;
  j["k"] = cfg.k ? nlohmann::json(*cfg.k) : nlohmann::json("random");
  auto modes = nlohmann::json::array();
  for (auto m : cfg.modes) modes.push_back(to_string(m));
  j["mode"] = modes;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  j["emit_analytic"] = cfg.emit_analytic;
  j["target"] = to_string(cfg.target);
  if (cfg.model == ModelKind::lingauss) {
    j["dataset_seed"] = cfg.effective_dataset_seed();
    j["point"] = cfg.point ? nlohmann::json(*cfg.point) : nlohmann::json("random");
    j["T"] = cfg.T;
    if (!cfg.dataset.empty()) j["dataset"] = cfg.dataset;
  }
  return j;
}

}  // namespace vriwae::harness

#endif  // VRIWAE_HARNESS_CONFIG_HPP
