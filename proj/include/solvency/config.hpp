#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "solvency/balance.hpp"
#include "solvency/tree.hpp"

namespace solvency {

struct PipelinePaths {
  std::string input;
  std::string output;
  std::string model;
  std::string report;
  std::string summary;

  friend bool operator==(const PipelinePaths&, const PipelinePaths&) = default;
};

// Settings shared by the CLI stages. Defaults: cf 0.25, min_leaf 2, 10 folds.
struct PipelineConfig {
  std::uint64_t seed = 1;
  LearnerParams learner;
  std::optional<BalanceTargets> balance;
  std::size_t feature_bins = 10;
  std::size_t folds = 10;
  PipelinePaths paths;
};

bool operator==(const BalanceTargets& a, const BalanceTargets& b);
bool operator==(const PipelineConfig& a, const PipelineConfig& b);

// JSON text; unknown keys are rejected, missing keys keep their defaults.
std::string to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);
void save_config(const std::string& path, const PipelineConfig& config);

}  // namespace solvency
