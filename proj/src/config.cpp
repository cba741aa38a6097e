#include "solvency/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "solvency/errors.hpp"

namespace solvency {

using nlohmann::json;

bool operator==(const BalanceTargets& a, const BalanceTargets& b) {
  return a.mode == b.mode && a.bias_to_uniform == b.bias_to_uniform &&
         a.sample_size_percent == b.sample_size_percent && a.target_counts == b.target_counts &&
         a.k_neighbors == b.k_neighbors && a.seed == b.seed;
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return a.seed == b.seed && a.learner == b.learner && a.balance == b.balance &&
         a.feature_bins == b.feature_bins && a.folds == b.folds && a.paths == b.paths;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

}  // namespace

std::string to_json(const PipelineConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["learner"] = {{"confidence_factor", config.learner.confidence_factor},
                  {"min_leaf", config.learner.min_leaf},
                  {"max_depth", config.learner.max_depth ? json(*config.learner.max_depth) : json(nullptr)}};
  if (config.balance) {
    const auto& b = *config.balance;
    j["balance"] = {{"mode", b.mode == BalanceMode::Resample ? "resample" : "smote"},
                    {"bias_to_uniform", b.bias_to_uniform},
                    {"sample_size_percent", b.sample_size_percent},
                    {"target_counts", b.target_counts},
                    {"k_neighbors", b.k_neighbors},
                    {"seed", b.seed}};
  } else {
    j["balance"] = nullptr;
  }
  j["feature_bins"] = config.feature_bins;
  j["folds"] = config.folds;
  j["paths"] = {{"input", config.paths.input},
                {"output", config.paths.output},
                {"model", config.paths.model},
                {"report", config.paths.report},
                {"summary", config.paths.summary}};
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  PipelineConfig config;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown(j, {"seed", "learner", "balance", "feature_bins", "folds", "paths"}, "config");
    read_into(j, "seed", config.seed);
    read_into(j, "feature_bins", config.feature_bins);
    read_into(j, "folds", config.folds);
    if (j.contains("learner")) {
      const auto& l = j.at("learner");
      reject_unknown(l, {"confidence_factor", "min_leaf", "max_depth"}, "learner");
      read_into(l, "confidence_factor", config.learner.confidence_factor);
      read_into(l, "min_leaf", config.learner.min_leaf);
      if (l.contains("max_depth") && !l.at("max_depth").is_null()) {
        config.learner.max_depth = l.at("max_depth").get<std::size_t>();
      }
    }
    if (j.contains("balance") && !j.at("balance").is_null()) {
      const auto& b = j.at("balance");
      reject_unknown(b, {"mode", "bias_to_uniform", "sample_size_percent", "target_counts", "k_neighbors", "seed"},
                     "balance");
      BalanceTargets targets;
      const auto mode = b.value("mode", std::string("resample"));
      if (mode == "resample") targets.mode = BalanceMode::Resample;
      else if (mode == "smote") targets.mode = BalanceMode::Smote;
      else throw std::invalid_argument("config: balance mode must be 'resample' or 'smote'");
      read_into(b, "bias_to_uniform", targets.bias_to_uniform);
      read_into(b, "sample_size_percent", targets.sample_size_percent);
      read_into(b, "target_counts", targets.target_counts);
      read_into(b, "k_neighbors", targets.k_neighbors);
      targets.seed = b.value("seed", config.seed);
      config.balance = targets;
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      reject_unknown(p, {"input", "output", "model", "report", "summary"}, "paths");
      read_into(p, "input", config.paths.input);
      read_into(p, "output", config.paths.output);
      read_into(p, "model", config.paths.model);
      read_into(p, "report", config.paths.report);
      read_into(p, "summary", config.paths.summary);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(config.learner);
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const std::string& path, const PipelineConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(config);
}

}  // namespace solvency
