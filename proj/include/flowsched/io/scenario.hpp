#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "flowsched/error.hpp"
#include "flowsched/network_model.hpp"
#include "flowsched/poa_study.hpp"
#include "flowsched/regret_harness.hpp"

namespace flowsched::io {

using Json = nlohmann::ordered_json;

// Scenario documents are JSON objects:
//
//   {
//     "seed": 7,
//     "vertices": ["s", "t"],
//     "edges": [{"name": "a", "u": "s", "v": "t", "coefficients": [1, 0, 0],
//                "noise": {"family": "uniform", "half_width": 0.5, "per_load": [0.5, 1]}}],
//     "commodities": [{"source": "s", "target": "t"}],
//     "poa_study": {...},
//     "regret_study": {...}
//   }
//
// Experiment sections are optional and only read by the matching command.

namespace detail {

inline void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, where + " must be an object");
}

inline void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorKind::MalformedConfig, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorKind::MalformedConfig, "missing '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::MalformedConfig, "bad value for '" + std::string(key) + "' in " + where);
  }
}

template <class T>
T get_or(const Json& j, const char* key, const std::string& where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline NoiseFamily parse_family(const std::string& name, const std::string& where) {
  if (name == "none") return NoiseFamily::None;
  if (name == "uniform") return NoiseFamily::Uniform;
  if (name == "two_point") return NoiseFamily::TwoPoint;
  throw Error(ErrorKind::MalformedConfig, "unknown noise family '" + name + "' in " + where);
}

}  // namespace detail

inline Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(ErrorKind::MalformedConfig, origin + ": " + err.what());
  }
}

inline Json load_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedConfig, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const Json doc = parse_json_text(buf.str(), path.string());
  detail::require_object(doc, path.string());
  return doc;
}

inline ScenarioConfig scenario_from_json(const Json& doc) {
  using namespace detail;
  require_object(doc, "scenario");
  allow_keys(doc, "scenario", {"seed", "vertices", "edges", "commodities", "poa_study", "regret_study"});
  ScenarioConfig cfg;
  cfg.seed = get_or<std::uint64_t>(doc, "seed", "scenario", 0);
  cfg.vertices = get<std::vector<std::string>>(doc, "vertices", "scenario");
  const Json edges = get<Json>(doc, "edges", "scenario");
  if (!edges.is_array()) throw Error(ErrorKind::MalformedConfig, "'edges' must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edge #" + std::to_string(i);
    const Json& e = edges[i];
    require_object(e, where);
    allow_keys(e, where, {"name", "u", "v", "coefficients", "noise"});
    EdgeSpec spec;
    spec.name = get_or<std::string>(e, "name", where, "e" + std::to_string(i));
    spec.u = get<std::string>(e, "u", where);
    spec.v = get<std::string>(e, "v", where);
    spec.coefficients = get<std::vector<double>>(e, "coefficients", where);
    if (e.contains("noise")) {
      const Json& n = e.at("noise");
      require_object(n, where + " noise");
      allow_keys(n, where + " noise", {"family", "half_width", "per_load"});
      spec.noise.family = parse_family(get<std::string>(n, "family", where), where);
      spec.noise.half_width = get_or<double>(n, "half_width", where, 0.0);
      spec.noise.per_load = get_or<std::vector<double>>(n, "per_load", where, {});
    }
    cfg.edges.push_back(std::move(spec));
  }
  const Json commodities = get<Json>(doc, "commodities", "scenario");
  if (!commodities.is_array()) throw Error(ErrorKind::MalformedConfig, "'commodities' must be an array");
  for (std::size_t k = 0; k < commodities.size(); ++k) {
    const std::string where = "commodity #" + std::to_string(k);
    const Json& c = commodities[k];
    require_object(c, where);
    allow_keys(c, where, {"source", "target"});
    cfg.commodities.push_back({get<std::string>(c, "source", where), get<std::string>(c, "target", where)});
  }
  return cfg;
}

inline Json scenario_to_json(const ScenarioConfig& cfg) {
  Json doc;
  doc["seed"] = cfg.seed;
  doc["vertices"] = cfg.vertices;
  doc["edges"] = Json::array();
  for (const auto& e : cfg.edges) {
    Json je;
    je["name"] = e.name;
    je["u"] = e.u;
    je["v"] = e.v;
    je["coefficients"] = e.coefficients;
    if (e.noise.family != NoiseFamily::None) {
      je["noise"] = {{"family", to_string(e.noise.family)}, {"half_width", e.noise.half_width}};
      if (!e.noise.per_load.empty()) je["noise"]["per_load"] = e.noise.per_load;
    }
    doc["edges"].push_back(std::move(je));
  }
  doc["commodities"] = Json::array();
  for (const auto& c : cfg.commodities) doc["commodities"].push_back({{"source", c.source}, {"target", c.target}});
  return doc;
}

inline InstanceSampling sampling_from_json(const Json& j, InstanceSampling law = {}) {
  using namespace detail;
  const std::string where = "poa_study.sampling";
  require_object(j, where);
  allow_keys(j, where,
             {"vertices_min", "vertices_max", "extra_edges_min", "extra_edges_max", "commodities_min",
              "commodities_max", "leading_min", "leading_max", "lower_zero_probability", "lower_max",
              "noise_half_width"});
  law.vertices_min = get_or(j, "vertices_min", where, law.vertices_min);
  law.vertices_max = get_or(j, "vertices_max", where, law.vertices_max);
  law.extra_edges_min = get_or(j, "extra_edges_min", where, law.extra_edges_min);
  law.extra_edges_max = get_or(j, "extra_edges_max", where, law.extra_edges_max);
  law.commodities_min = get_or(j, "commodities_min", where, law.commodities_min);
  law.commodities_max = get_or(j, "commodities_max", where, law.commodities_max);
  law.leading_min = get_or(j, "leading_min", where, law.leading_min);
  law.leading_max = get_or(j, "leading_max", where, law.leading_max);
  law.lower_zero_probability = get_or(j, "lower_zero_probability", where, law.lower_zero_probability);
  law.lower_max = get_or(j, "lower_max", where, law.lower_max);
  law.noise_half_width = get_or(j, "noise_half_width", where, law.noise_half_width);
  validate(law);
  return law;
}

inline Json sampling_to_json(const InstanceSampling& law) {
  return {{"vertices_min", law.vertices_min},
          {"vertices_max", law.vertices_max},
          {"extra_edges_min", law.extra_edges_min},
          {"extra_edges_max", law.extra_edges_max},
          {"commodities_min", law.commodities_min},
          {"commodities_max", law.commodities_max},
          {"leading_min", law.leading_min},
          {"leading_max", law.leading_max},
          {"lower_zero_probability", law.lower_zero_probability},
          {"lower_max", law.lower_max},
          {"noise_half_width", law.noise_half_width}};
}

// Reads the optional "poa_study" section over `cfg`'s defaults.
inline PoaStudyConfig poa_study_from_json(const Json& doc, PoaStudyConfig cfg = {}) {
  using namespace detail;
  if (doc.contains("seed")) cfg.seed = get<std::uint64_t>(doc, "seed", "document");
  if (!doc.contains("poa_study")) return cfg;
  const Json& j = doc.at("poa_study");
  const std::string where = "poa_study";
  require_object(j, where);
  allow_keys(j, where,
             {"samples", "orders", "bin_width", "histogram_max", "per_order", "enumeration_cap", "sampling"});
  cfg.samples = get_or(j, "samples", where, cfg.samples);
  cfg.orders = get_or(j, "orders", where, cfg.orders);
  cfg.bin_width = get_or(j, "bin_width", where, cfg.bin_width);
  cfg.histogram_max = get_or(j, "histogram_max", where, cfg.histogram_max);
  cfg.per_order = get_or(j, "per_order", where, cfg.per_order);
  cfg.enumeration_cap = get_or(j, "enumeration_cap", where, cfg.enumeration_cap);
  if (j.contains("sampling")) cfg.sampling = sampling_from_json(j.at("sampling"), cfg.sampling);
  return cfg;
}

inline Json poa_study_to_json(const PoaStudyConfig& cfg) {
  return {{"samples", cfg.samples},
          {"orders", cfg.orders},
          {"bin_width", cfg.bin_width},
          {"histogram_max", cfg.histogram_max},
          {"per_order", cfg.per_order},
          {"enumeration_cap", cfg.enumeration_cap},
          {"sampling", sampling_to_json(cfg.sampling)}};
}

inline RegretStudyConfig regret_study_from_json(const Json& doc, RegretStudyConfig cfg = {}) {
  using namespace detail;
  if (doc.contains("seed")) cfg.seed = get<std::uint64_t>(doc, "seed", "document");
  if (!doc.contains("regret_study")) return cfg;
  const Json& j = doc.at("regret_study");
  const std::string where = "regret_study";
  require_object(j, where);
  allow_keys(j, where, {"g_base", "multipliers", "horizon", "checkpoints", "replications"});
  cfg.g_base = get_or(j, "g_base", where, cfg.g_base);
  cfg.multipliers = get_or(j, "multipliers", where, cfg.multipliers);
  cfg.horizon = get_or(j, "horizon", where, cfg.horizon);
  cfg.checkpoints = get_or(j, "checkpoints", where, cfg.checkpoints);
  cfg.replications = get_or(j, "replications", where, cfg.replications);
  return cfg;
}

inline Json regret_study_to_json(const RegretStudyConfig& cfg) {
  return {{"g_base", cfg.g_base},
          {"multipliers", cfg.multipliers},
          {"horizon", cfg.horizon},
          {"checkpoints", cfg.checkpoints},
          {"replications", cfg.replications}};
}

}  // namespace flowsched::io
