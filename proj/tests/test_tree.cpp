#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "solvency/datagen.hpp"
#include "solvency/tree.hpp"

using namespace solvency;
using test::make_dataset;

namespace {

using Counts = std::vector<std::size_t>;

double training_accuracy(const TreeModel& model, const Dataset& ds) {
  std::size_t correct = 0;
  for (const auto& r : ds.records()) correct += predict(model, r).label == *r.label;
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

void check_min_leaf(const TreeNode& node, std::size_t min_leaf) {
  if (node.is_leaf()) return;
  CHECK(node.left->total() >= min_leaf);
  CHECK(node.right->total() >= min_leaf);
  check_min_leaf(*node.left, min_leaf);
  check_min_leaf(*node.right, min_leaf);
}

void collect_leaves(const TreeNode& node, std::vector<const TreeNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  collect_leaves(*node.left, out);
  collect_leaves(*node.right, out);
}

TreeNode leaf(ClassCounts c) { return TreeNode(c); }

TreeNode split(std::size_t attr, double threshold, TreeNode l, TreeNode r) {
  TreeNode n;
  for (std::size_t c = 0; c < kNumClasses; ++c) n.counts[c] = l.counts[c] + r.counts[c];
  n.attribute = attr;
  n.threshold = threshold;
  n.left = std::make_unique<TreeNode>(std::move(l));
  n.right = std::make_unique<TreeNode>(std::move(r));
  return n;
}

}  // namespace

TEST_CASE("entropy spot values") {
  CHECK(entropy(Counts{5, 5}) == 1.0);
  CHECK(entropy(Counts{10, 0}) == 0.0);
  // -(1/3) log2(1/3) - (2/3) log2(2/3)
  CHECK(std::abs(entropy(Counts{2, 4}) - 0.9183) < 1e-4);
  CHECK(entropy(Counts{2, 4}) == doctest::Approx(oracle::entropy_bits({2, 4})).epsilon(1e-12));
  CHECK(entropy(Counts{1, 1, 1, 1}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(entropy(Counts{0, 0}), std::invalid_argument);
}

TEST_CASE("best_split on a pure node") {
  auto data = TrainingData::from(make_dataset({{1, 2, 3, 4}}, {1, 1, 1, 1}));
  CHECK_FALSE(best_split(data, LearnerParams{}));
}

TEST_CASE("best_split on 1-D [A,A,B,B]") {
  auto data = TrainingData::from(make_dataset({{1, 2, 3, 4}}, {0, 0, 1, 1}));
  auto s = best_split(data, LearnerParams{});
  REQUIRE(s);
  CHECK(s->threshold == 2.0);
  CHECK(s->gain == 1.0);
  CHECK(s->gain_ratio == 1.0);
  CHECK(s->n_left == 2);
  CHECK(s->n_right == 2);
}

TEST_CASE("best_split respects min_leaf") {
  auto data = TrainingData::from(make_dataset({{1, 2, 3, 4, 5}}, {0, 1, 1, 1, 1}));
  LearnerParams p;
  p.min_leaf = 2;
  auto s = best_split(data, p);
  REQUIRE(s);
  CHECK(s->n_left >= 2);
  p.min_leaf = 3;
  CHECK_FALSE(best_split(data, p));
}

TEST_CASE("best_split agrees with exhaustive enumeration") {
  Rng rng(1234);
  int with_split = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto t = test::random_table(rng, 10, 3);
    LearnerParams p;
    p.min_leaf = 1 + rng.uniform_index(3);
    auto data = TrainingData::from(make_dataset(t.columns, t.labels));
    const auto got = best_split(data, p);
    const auto want = oracle::exhaustive_split(t.columns, t.labels, kNumClasses, p.min_leaf);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    ++with_split;
    CHECK(got->position == want->position);
    CHECK(got->threshold == want->threshold);
    CHECK(std::abs(got->gain - want->gain) < 1e-9);
    CHECK(std::abs(got->gain_ratio - want->gain_ratio) < 1e-9);
  }
  CHECK(with_split > 100);
}

TEST_CASE("gain ratio is invariant under a monotone transform of one attribute") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = test::random_table(rng, 12, 1);
    auto transformed = t.columns;
    for (auto& v : transformed[0]) v = std::exp(2.0 * v) + 3.0;
    auto a = best_split(TrainingData::from(make_dataset(t.columns, t.labels)), LearnerParams{});
    auto b = best_split(TrainingData::from(make_dataset(transformed, t.labels)), LearnerParams{});
    REQUIRE(a.has_value() == b.has_value());
    if (!a) continue;
    CHECK(b->threshold == std::exp(2.0 * a->threshold) + 3.0);
    CHECK(a->gain == doctest::Approx(b->gain).epsilon(1e-12));
    CHECK(a->gain_ratio == doctest::Approx(b->gain_ratio).epsilon(1e-12));
  }
}

TEST_CASE("pessimistic error") {
  CHECK(pessimistic_error(0, 1, 0.25) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::abs(pessimistic_error(0, 4, 0.25) - 0.2929) < 1e-4);
  for (std::size_t n = 1; n <= 50; ++n) {
    CHECK(std::abs(pessimistic_error(0, n, 0.25) - oracle::zero_error_bound(n, 0.25)) < 1e-9);
  }
  CHECK(pessimistic_error(3, 3, 0.25) == 1.0);
  for (std::size_t n = 1; n <= 30; ++n) {
    for (std::size_t e = 0; e < n; ++e) {
      const double here = pessimistic_error(e, n, 0.25);
      CHECK(here >= static_cast<double>(e) / static_cast<double>(n));
      CHECK(pessimistic_error(e + 1, n, 0.25) > here);
    }
    CHECK(pessimistic_error(0, n + 1, 0.25) < pessimistic_error(0, n, 0.25));
  }
  // Weaker pruning as cf grows.
  CHECK(pessimistic_error(2, 10, 0.5) < pessimistic_error(2, 10, 0.25));
  CHECK_THROWS_AS(pessimistic_error(0, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pessimistic_error(0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pessimistic_error(5, 4, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(pessimistic_error(0, 0, 0.25), std::invalid_argument);
}

TEST_CASE("prune collapses children that agree with the parent") {
  auto t = split(0, 1.0, leaf({0, 0, 1, 4}), leaf({0, 0, 1, 4}));
  auto pruned = prune(t, 0.25);
  CHECK(pruned.is_leaf());
  CHECK(pruned.counts == ClassCounts{0, 0, 2, 8});
}

TEST_CASE("prune keeps a split between two large pure children") {
  auto t = split(0, 1.0, leaf({50, 0, 0, 0}), leaf({0, 0, 0, 50}));
  auto pruned = prune(t, 0.25);
  CHECK(pruned == t);
}

TEST_CASE("prune is idempotent and monotone in cf") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto t = test::random_table(rng, 60, 3);
    auto ds = make_dataset(t.columns, t.labels);
    auto model = grow_unpruned(ds);
    auto once = prune(model.root, 0.25);
    CHECK(prune(once, 0.25) == once);
    std::size_t previous = model.root.node_count();
    for (double cf : {0.5, 0.4, 0.25, 0.1, 0.01, 0.001}) {
      const auto nodes = prune(model.root, cf).node_count();
      CHECK(nodes <= previous);
      previous = nodes;
    }
  }
}

TEST_CASE("grow on a single record") {
  auto ds = make_dataset({{3.0}}, {2});
  auto model = grow(ds);
  CHECK(model.root.is_leaf());
  CHECK(model.root.predicted() == SolvencyClass::Moderate);
  CHECK(model.training_size == 1);
  CHECK_THROWS_AS(grow(Dataset{}), std::invalid_argument);
}

TEST_CASE("separable data is fit perfectly before pruning") {
  std::vector<double> x;
  std::vector<std::size_t> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i);
    y.push_back(i < 8 ? 0 : 3);
  }
  auto ds = make_dataset({x}, y);
  auto model = grow_unpruned(ds);
  CHECK(training_accuracy(model, ds) == 1.0);
  CHECK(model.root.threshold == 7.0);
}

TEST_CASE("pruning never raises training accuracy; root majority is a floor") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto t = test::random_table(rng, 80, 3);
    auto ds = make_dataset(t.columns, t.labels);
    auto unpruned = grow_unpruned(ds);
    auto pruned = grow(ds);
    const auto counts = class_distribution(ds);
    const double majority = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                            static_cast<double>(ds.size());
    const double acc_u = training_accuracy(unpruned, ds);
    const double acc_p = training_accuracy(pruned, ds);
    CHECK(acc_u >= acc_p - 1e-12);
    CHECK(acc_p >= majority - 1e-12);
  }
}

TEST_CASE("tree structure invariants") {
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    auto t = test::random_table(rng, 80, 3);
    auto ds = make_dataset(t.columns, t.labels);
    for (bool pruned : {false, true}) {
      auto model = pruned ? grow(ds) : grow_unpruned(ds);
      check_min_leaf(model.root, 2);
      // Routing reproduces every leaf's tally.
      std::map<const TreeNode*, ClassCounts> tally;
      for (const auto& r : ds.records()) ++tally[&route(model, r)][class_index(*r.label)];
      std::vector<const TreeNode*> leaves;
      collect_leaves(model.root, leaves);
      for (const auto* l : leaves) {
        CHECK(l->total() >= 1);
        CHECK(tally[l] == l->counts);
      }
    }
    // Thresholds are values that occur in the training data.
    auto model = grow_unpruned(ds);
    std::vector<const TreeNode*> todo{&model.root};
    while (!todo.empty()) {
      const auto* n = todo.back();
      todo.pop_back();
      if (n->is_leaf()) continue;
      const auto& col = t.columns[n->attribute];
      CHECK(std::find(col.begin(), col.end(), n->threshold) != col.end());
      todo.push_back(n->left.get());
      todo.push_back(n->right.get());
    }
  }
}

TEST_CASE("max_depth limits growth") {
  auto ds = generate({{10, 10, 10, 10}, 4.0, 3, 1});
  LearnerParams p;
  p.max_depth = 1;
  CHECK(grow_unpruned(ds, p).root.depth() <= 1);
  p.max_depth = 0;
  CHECK(grow_unpruned(ds, p).root.is_leaf());
}

TEST_CASE("learner parameter validation") {
  auto ds = make_dataset({{1, 2}}, {0, 1});
  LearnerParams p;
  p.confidence_factor = 0.6;
  CHECK_THROWS_AS(grow(ds, p), std::invalid_argument);
  p.confidence_factor = 0.25;
  p.min_leaf = 0;
  CHECK_THROWS_AS(grow(ds, p), std::invalid_argument);
}

TEST_CASE("predict") {
  TreeModel single;
  single.root = leaf({0, 0, 0, 9});
  single.schema = {0};
  CompanyRecord r;
  r.v[0] = 1.0;
  auto p = predict(single, r);
  CHECK(p.label == SolvencyClass::Strong);
  CHECK(p.probabilities == std::array<double, 4>{0, 0, 0, 1});

  CompanyRecord missing;
  CHECK_THROWS_AS(predict(single, missing), std::invalid_argument);

  auto ds = generate({{30, 10, 10, 60}, 1.0, 4, 8});
  auto model = grow(ds);
  for (const auto& rec : ds.records()) {
    auto pr = predict(model, rec);
    double sum = 0.0;
    for (double x : pr.probabilities) sum += x;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    const auto argmax = std::max_element(pr.probabilities.begin(), pr.probabilities.end()) - pr.probabilities.begin();
    CHECK(class_index(pr.label) == static_cast<std::size_t>(argmax));
  }
}

TEST_CASE("ties in leaf counts go to the earlier class") {
  CHECK(leaf({0, 3, 3, 0}).predicted() == SolvencyClass::Weak);
  CHECK(leaf({2, 0, 0, 2}).predicted() == SolvencyClass::Insolvency);
}

TEST_CASE("separable records predict their training class") {
  auto ds = generate({{20, 20, 20, 20}, 8.0, 3, 2});
  auto model = grow(ds);
  for (const auto& r : ds.records()) CHECK(predict(model, r).label == *r.label);
}
