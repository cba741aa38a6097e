#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "solvency/datagen.hpp"
#include "solvency/eval.hpp"

using namespace solvency;

namespace {

ProbabilityVector one_hot(SolvencyClass c) {
  ProbabilityVector p{};
  p[class_index(c)] = 1.0;
  return p;
}

// Predictions and actual labels reproducing a confusion matrix cell by cell.
std::pair<std::vector<Prediction>, std::vector<SolvencyClass>> from_matrix(
    const std::array<std::array<std::size_t, 4>, 4>& cells) {
  std::vector<Prediction> preds;
  std::vector<SolvencyClass> actual;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t i = 0; i < cells[r][c]; ++i) {
        preds.push_back({class_at(c), one_hot(class_at(c))});
        actual.push_back(class_at(r));
      }
  return {preds, actual};
}

// Whitespace-collapsed line of the rendered report that starts with `label`.
std::string row(const std::string& report, const std::string& label) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string w, joined;
    while (words >> w) joined += (joined.empty() ? "" : " ") + w;
    if (joined.rfind(label + " ", 0) == 0) return joined;
  }
  return {};
}

}  // namespace

TEST_CASE("mae and rmse hand values") {
  std::vector<ProbabilityVector> perfect{one_hot(SolvencyClass::Weak), one_hot(SolvencyClass::Strong)};
  std::vector<SolvencyClass> actual{SolvencyClass::Weak, SolvencyClass::Strong};
  CHECK(mae(perfect, actual) == 0.0);
  CHECK(rmse(perfect, actual) == 0.0);

  std::vector<ProbabilityVector> wrong{one_hot(SolvencyClass::Insolvency)};
  std::vector<SolvencyClass> truth{SolvencyClass::Strong};
  CHECK(mae(wrong, truth) == 0.5);
  CHECK(std::abs(rmse(wrong, truth) - std::sqrt(0.5)) < 1e-12);
  CHECK(std::abs(rmse(wrong, truth) - 0.7071) < 1e-4);

  std::vector<ProbabilityVector> uniform{{0.25, 0.25, 0.25, 0.25}};
  for (auto c : kClassAlphabet) CHECK(mae(uniform, std::vector<SolvencyClass>{c}) == doctest::Approx(0.375));

  CHECK_THROWS_AS(mae(perfect, truth), std::invalid_argument);
  CHECK_THROWS_AS(rmse(perfect, truth), std::invalid_argument);
}

TEST_CASE("rmse is never below mae") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng.uniform_index(20);
    std::vector<ProbabilityVector> p(n);
    std::vector<SolvencyClass> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (auto& x : p[i]) sum += (x = rng.uniform01());
      for (auto& x : p[i]) x /= sum;
      a[i] = class_at(rng.uniform_index(4));
    }
    CHECK(rmse(p, a) >= mae(p, a) - 1e-15);
  }
}

TEST_CASE("stratified folds on the 616-record set") {
  auto ds = generate({{44, 13, 16, 543}, 6.0, 11, 9});
  auto folds = stratified_folds(ds, 10, 4);
  REQUIRE(folds.size() == 10);
  std::multiset<std::size_t> sizes;
  std::set<std::size_t> seen;
  std::array<std::vector<std::size_t>, 4> per_class;
  for (const auto& f : folds) {
    sizes.insert(f.size());
    CHECK(std::is_sorted(f.begin(), f.end()));
    ClassCounts counts{};
    for (auto i : f) {
      CHECK(seen.insert(i).second);
      ++counts[class_index(*ds[i].label)];
    }
    for (std::size_t c = 0; c < 4; ++c) per_class[c].push_back(counts[c]);
  }
  CHECK(seen.size() == ds.size());
  CHECK(sizes.count(62) == 6);
  CHECK(sizes.count(61) == 4);
  for (const auto& v : per_class) CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) <= 1);
  CHECK(stratified_folds(ds, 10, 4) == folds);
}

TEST_CASE("leave-one-out and fold-count errors") {
  auto ds = generate({{3, 2, 2, 5}, 6.0, 3, 1});
  auto folds = stratified_folds(ds, ds.size(), 0);
  for (const auto& f : folds) CHECK(f.size() == 1);
  CHECK_THROWS_AS(stratified_folds(ds, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(stratified_folds(ds, ds.size() + 1, 0), std::invalid_argument);
}

TEST_CASE("cross-validation on a constant label") {
  auto ds = generate({{0, 0, 0, 40}, 6.0, 3, 2});
  auto report = cross_validate(ds, 10, LearnerParams{}, std::nullopt, 1);
  CHECK(report.overall_accuracy == 1.0);
  CHECK(report.mae == 0.0);
  CHECK(report.n == 40);
  // Absent classes were never there to lose.
  CHECK(report.warnings.empty());
}

TEST_CASE("a fold losing a class yields a warning, not an error") {
  auto ds = generate({{1, 0, 0, 30}, 6.0, 3, 2});
  auto report = cross_validate(ds, 5, LearnerParams{}, std::nullopt, 1);
  CHECK(report.n == 31);
  CHECK(report.warnings.size() == 1);
}

TEST_CASE("cross-validation on separable data") {
  auto ds = generate({{44, 13, 16, 543}, 6.0, 11, 21});
  auto report = cross_validate(ds, 10, LearnerParams{}, std::nullopt, 5);
  CHECK(report.overall_accuracy >= 0.95);
  CHECK(report.matrix.total() == ds.size());
  CHECK(report.correct == report.matrix.trace());
  CHECK(report.overall_accuracy == static_cast<double>(report.correct) / static_cast<double>(ds.size()));
  CHECK(cross_validate(ds, 10, LearnerParams{}, std::nullopt, 5).matrix == report.matrix);

  BalanceTargets b;
  b.seed = 3;
  auto balanced = cross_validate(ds, 10, LearnerParams{}, b, 5);
  // Balancing touches only training folds, so the pooled held-out total is unchanged.
  CHECK(balanced.n == ds.size());
  CHECK(balanced.overall_accuracy >= 0.95);
  CHECK(render_report(balanced) == render_report(cross_validate(ds, 10, LearnerParams{}, b, 5)));
}

TEST_CASE("supplied test-set arithmetic") {
  auto [preds, actual] = from_matrix({{{4, 0, 1, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}, {1, 2, 1, 53}}});
  auto report = make_report(preds, actual);
  CHECK(report.n == 65);
  CHECK(report.correct == 59);
  CHECK(report.overall_accuracy == doctest::Approx(59.0 / 65.0));
  const auto text = render_report(report);
  CHECK(row(text, "Total") == "Total 65 90.8%");
  CHECK(row(text, "I") == "I 4 0 1 1 6 66.7%");
  CHECK(row(text, "S") == "S 1 2 1 53 57 93.0%");
  CHECK(report.per_class_recall[0] == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("report layout matches the cross-validation table") {
  auto [preds, actual] = from_matrix({{{152, 2, 0, 3}, {0, 137, 0, 0}, {0, 0, 144, 0}, {2, 3, 6, 167}}});
  auto report = make_report(preds, actual);
  const auto text = render_report(report, "10-fold");
  CHECK(text.rfind("10-fold\nClassification", 0) == 0);
  CHECK(row(text, "I") == "I 152 2 0 3 157 96.8%");
  CHECK(row(text, "S") == "S 2 3 6 167 178 93.8%");
  CHECK(row(text, "Total") == "Total 616 97.4%");
  CHECK(text.find("Accuracy: 0.9740") != std::string::npos);
  CHECK(report.mae == doctest::Approx(2.0 * 16.0 / (616.0 * 4.0)));
}

TEST_CASE("empty rows render as a dash and have zero recall") {
  auto [preds, actual] = from_matrix({{{0, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 3}}});
  auto report = make_report(preds, actual);
  CHECK(report.per_class_recall[0] == 0.0);
  CHECK(row(render_report(report), "I") == "I 0 0 0 0 0 -");
  const auto summary = render_summary(report);
  CHECK(summary.find("n=5\n") != std::string::npos);
  CHECK(summary.find("confusion_strong=0,0,0,3\n") != std::string::npos);
}

TEST_CASE("evaluate_on") {
  auto ds = generate({{20, 20, 20, 20}, 8.0, 3, 2});
  auto model = grow_unpruned(ds);
  auto report = evaluate_on(model, ds);
  CHECK(report.overall_accuracy == 1.0);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      if (r != c) CHECK(report.matrix.cells[r][c] == 0);
  CHECK_THROWS_AS(evaluate_on(model, ds.project({0})), std::invalid_argument);
}
