#include "solvency/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "solvency/errors.hpp"
#include "solvency/random.hpp"

namespace solvency {

std::size_t ConfusionMatrix::row_total(std::size_t actual) const noexcept {
  return std::accumulate(cells[actual].begin(), cells[actual].end(), std::size_t{0});
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) t += row_total(r);
  return t;
}

std::size_t ConfusionMatrix::trace() const noexcept {
  std::size_t t = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) t += cells[r][r];
  return t;
}

namespace {

void check_lengths(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("prediction/actual length mismatch");
}

template <typename Term>
double mean_residual(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual, Term term) {
  check_lengths(predicted, actual);
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double target = class_index(actual[i]) == c ? 1.0 : 0.0;
      sum += term(predicted[i][c] - target);
    }
  }
  return sum / static_cast<double>(predicted.size() * kNumClasses);
}

}  // namespace

double mae(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual) {
  return mean_residual(predicted, actual, [](double d) { return std::abs(d); });
}

double rmse(std::span<const ProbabilityVector> predicted, std::span<const SolvencyClass> actual) {
  return std::sqrt(mean_residual(predicted, actual, [](double d) { return d * d; }));
}

EvalReport make_report(std::span<const Prediction> predictions, std::span<const SolvencyClass> actual) {
  if (predictions.size() != actual.size()) throw std::invalid_argument("prediction/actual length mismatch");
  EvalReport report;
  report.n = predictions.size();
  std::vector<ProbabilityVector> probs;
  probs.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    report.matrix.add(actual[i], predictions[i].label);
    if (predictions[i].label == actual[i]) ++report.correct;
    probs.push_back(predictions[i].probabilities);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto row = report.matrix.row_total(c);
    report.per_class_recall[c] = row == 0 ? 0.0 : static_cast<double>(report.matrix.cells[c][c]) / static_cast<double>(row);
  }
  report.overall_accuracy =
      report.n == 0 ? 0.0 : static_cast<double>(report.matrix.trace()) / static_cast<double>(report.n);
  report.mae = mae(probs, actual);
  report.rmse = rmse(probs, actual);
  return report;
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (k > ds.size()) {
    throw std::invalid_argument("cannot make " + std::to_string(k) + " folds from " + std::to_string(ds.size()) +
                                " records");
  }
  auto by_class = indices_by_class(ds);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::size_t>(by_class[c]));
    for (auto i : by_class[c]) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

EvalReport cross_validate(const Dataset& ds, std::size_t k, const LearnerParams& params,
                          const std::optional<BalanceTargets>& balance, std::uint64_t seed) {
  validate(params);
  const auto folds = stratified_folds(ds, k, seed);
  std::vector<Prediction> predictions;
  std::vector<SolvencyClass> actual;
  predictions.reserve(ds.size());
  actual.reserve(ds.size());
  std::vector<std::string> warnings;
  const auto full_counts = class_distribution(ds);

  std::vector<bool> held_out(ds.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::fill(held_out.begin(), held_out.end(), false);
    for (auto i : folds[f]) held_out[i] = true;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(ds.size() - folds[f].size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!held_out[i]) train_idx.push_back(i);
    }
    Dataset train = ds.subset(train_idx);
    const auto train_counts = class_distribution(train);
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (full_counts[c] > 0 && train_counts[c] == 0) {
        warnings.push_back("fold " + std::to_string(f + 1) + ": training portion has no '" +
                           std::string(to_string(class_at(c))) + "' records");
      }
    }
    if (balance) {
      auto fold_balance = *balance;
      fold_balance.seed = derive_seed(balance->seed, 0xF01D0000ULL + f);
      try {
        train = apply_balance(train, fold_balance);
      } catch (const std::exception& e) {
        warnings.push_back("fold " + std::to_string(f + 1) + ": balancing skipped: " + e.what());
      }
    }
    const auto model = grow(train, params);
    for (auto i : folds[f]) {
      predictions.push_back(predict(model, ds[i]));
      actual.push_back(*ds[i].label);
    }
  }
  auto report = make_report(predictions, actual);
  report.warnings = std::move(warnings);
  return report;
}

EvalReport evaluate_on(const TreeModel& model, const Dataset& test) {
  for (auto j : model.schema) {
    if (!test.has_attribute(j)) {
      throw std::invalid_argument("test set lacks model attribute " + attribute_name(j));
    }
  }
  std::vector<Prediction> predictions;
  std::vector<SolvencyClass> actual;
  predictions.reserve(test.size());
  actual.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test[i].label) throw StateError("test record " + std::to_string(i) + " is unlabeled");
    predictions.push_back(predict(model, test[i]));
    actual.push_back(*test[i].label);
  }
  return make_report(predictions, actual);
}

}  // namespace solvency
