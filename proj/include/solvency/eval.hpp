#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solvency/balance.hpp"
#include "solvency/dataset.hpp"
#include "solvency/tree.hpp"

namespace solvency {

using ProbabilityVector = std::array<double, kNumClasses>;

// Rows are actual classes, columns predicted, both in class alphabet order.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> cells{};

  void add(SolvencyClass actual, SolvencyClass predicted) { ++cells[class_index(actual)][class_index(predicted)]; }
  std::size_t row_total(std::size_t actual) const noexcept;
  std::size_t total() const noexcept;
  std::size_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct EvalReport {
  ConfusionMatrix matrix;
  std::array<double, kNumClasses> per_class_recall{};  // 0 for classes with no instances
  double overall_accuracy = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  std::size_t correct = 0;  // counted from predictions, independently of the matrix
  std::vector<std::string> warnings;
};

// Mean over n * 4 terms of |p_ij - a_ij|, a the one-hot actual class.
double mae(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual);
// Square root of the mean over n * 4 terms of (p_ij - a_ij)^2.
double rmse(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual);

// Builds a report from pooled predictions.
EvalReport make_report(std::span<const Prediction> predictions, std::span<const SolvencyClass> actual);

// k disjoint, sorted index sets. Records are grouped by class in input order,
// shuffled within each class, then dealt round-robin across folds with one
// running counter, so both per-class and total fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed);

// Balancing (when given) touches the training portion of each fold only; its
// seed is derived from the fold index. Predictions are pooled in fold order.
EvalReport cross_validate(const Dataset& ds, std::size_t k, const LearnerParams& params,
                          const std::optional<BalanceTargets>& balance, std::uint64_t seed);

// Throws std::invalid_argument when the test schema lacks a model attribute.
EvalReport evaluate_on(const TreeModel& model, const Dataset& test);

// Confusion table with counts, totals and row percentages (one decimal), then
// accuracy, MAE and RMSE to four decimals.
std::string render_report(const EvalReport& report, const std::string& title = {});
// key=value lines for scripts.
std::string render_summary(const EvalReport& report);

}  // namespace solvency
