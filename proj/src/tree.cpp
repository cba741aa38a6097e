#include "solvency/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "solvency/errors.hpp"

namespace solvency {

namespace {

// Score comparisons tolerate rounding noise between algebraically equal values.
constexpr double kScoreEps = 1e-12;

}  // namespace

void validate(const LearnerParams& params) {
  if (!(params.confidence_factor > 0.0 && params.confidence_factor <= 0.5)) {
    throw std::invalid_argument("confidence factor must lie in (0, 0.5]");
  }
  if (params.min_leaf < 1) throw std::invalid_argument("min_leaf must be at least 1");
}

// --- TreeNode ---------------------------------------------------------------

TreeNode::TreeNode(const TreeNode& other)
    : counts(other.counts), attribute(other.attribute), threshold(other.threshold) {
  if (other.left) left = std::make_unique<TreeNode>(*other.left);
  if (other.right) right = std::make_unique<TreeNode>(*other.right);
}

TreeNode& TreeNode::operator=(const TreeNode& other) {
  if (this != &other) *this = TreeNode(other);
  return *this;
}

SolvencyClass TreeNode::predicted() const noexcept {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return class_at(best);
}

std::size_t TreeNode::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::size_t TreeNode::node_count() const noexcept {
  return is_leaf() ? 1 : 1 + left->node_count() + right->node_count();
}

std::size_t TreeNode::leaf_count() const noexcept {
  return is_leaf() ? 1 : left->leaf_count() + right->leaf_count();
}

std::size_t TreeNode::depth() const noexcept {
  return is_leaf() ? 0 : 1 + std::max(left->depth(), right->depth());
}

bool operator==(const TreeNode& a, const TreeNode& b) noexcept {
  if (a.counts != b.counts || a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return true;
  return a.attribute == b.attribute && a.threshold == b.threshold && *a.left == *b.left && *a.right == *b.right;
}

// --- split search -----------------------------------------------------------

TrainingData TrainingData::from(const Dataset& ds) {
  TrainingData data;
  data.schema = ds.schema();
  data.columns.assign(ds.schema().size(), std::vector<double>(ds.size()));
  data.labels.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto& rec = ds[r];
    if (!rec.label) throw StateError("training record " + std::to_string(r) + " is unlabeled");
    data.labels.push_back(class_index(*rec.label));
    for (std::size_t a = 0; a < data.schema.size(); ++a) data.columns[a][r] = rec.v[data.schema[a]];
  }
  return data;
}

double entropy(std::span<const std::size_t> counts) {
  const auto n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n == 0) throw std::invalid_argument("entropy of an all-zero count vector");
  const auto total = static_cast<double>(n);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

ClassCounts count_rows(const TrainingData& data, std::span<const std::size_t> rows) {
  ClassCounts counts{};
  for (auto r : rows) ++counts[data.labels[r]];
  return counts;
}

bool is_pure(const ClassCounts& counts) {
  return std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
}

}  // namespace

std::optional<SplitCandidate> best_split(const TrainingData& data, std::span<const std::size_t> rows,
                                         const LearnerParams& params) {
  const std::size_t n = rows.size();
  const std::size_t min_leaf = std::max<std::size_t>(params.min_leaf, 1);
  if (n < 2 || n < 2 * min_leaf) return std::nullopt;
  const ClassCounts parent = count_rows(data, rows);
  if (is_pure(parent)) return std::nullopt;
  const double parent_entropy = entropy(parent);
  const auto total = static_cast<double>(n);

  std::vector<SplitCandidate> candidates;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t pos = 0; pos < data.columns.size(); ++pos) {
    const auto& column = data.columns[pos];
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return column[a] < column[b]; });
    ClassCounts left{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[data.labels[order[i]]];
      const double value = column[order[i]];
      if (value == column[order[i + 1]]) continue;
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < min_leaf || n_right < min_leaf) continue;
      ClassCounts right{};
      for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = parent[c] - left[c];
      const double wl = static_cast<double>(n_left) / total;
      const double wr = static_cast<double>(n_right) / total;
      const double gain = parent_entropy - wl * entropy(left) - wr * entropy(right);
      const double split_info = -wl * std::log2(wl) - wr * std::log2(wr);
      candidates.push_back({pos, data.schema[pos], value, gain, gain / split_info, n_left, n_right});
    }
  }
  if (candidates.empty()) return std::nullopt;

  double mean_gain = 0.0;
  for (const auto& c : candidates) mean_gain += c.gain;
  mean_gain /= static_cast<double>(candidates.size());

  const SplitCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.gain < mean_gain - kScoreEps) continue;
    if (!best || c.gain_ratio > best->gain_ratio + kScoreEps) best = &c;
  }
  if (!best || best->gain <= kScoreEps) return std::nullopt;
  return *best;
}

std::optional<SplitCandidate> best_split(const TrainingData& data, const LearnerParams& params) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return best_split(data, rows, params);
}

// --- pruning ----------------------------------------------------------------

namespace {

// P[Binomial(n, p) <= e], summed in log space.
double binomial_cdf(std::size_t e, std::size_t n, double p) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return e >= n ? 1.0 : 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i <= e; ++i) {
    const auto di = static_cast<double>(i);
    const double log_term = log_n_fact - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0) +
                            di * log_p + static_cast<double>(n - i) * log_q;
    sum += std::exp(log_term);
  }
  return std::min(sum, 1.0);
}

double subtree_error(const TreeNode& node, double cf) {
  if (node.is_leaf()) {
    const auto n = node.total();
    return static_cast<double>(n) * pessimistic_error(node.errors(), n, cf);
  }
  return subtree_error(*node.left, cf) + subtree_error(*node.right, cf);
}

}  // namespace

double pessimistic_error(std::size_t e, std::size_t n, double cf) {
  if (!(cf > 0.0 && cf < 1.0)) throw std::invalid_argument("confidence factor must lie in (0, 1)");
  if (n == 0) throw std::invalid_argument("pessimistic_error needs n >= 1");
  if (e > n) throw std::invalid_argument("pessimistic_error needs e <= n");
  if (e == n) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  // The CDF decreases in p; bracket halves until it is below double resolution.
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_cdf(e, n, mid) > cf) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TreeNode prune(const TreeNode& root, double cf) {
  if (root.is_leaf()) return TreeNode(root.counts);
  TreeNode node(root.counts);
  node.attribute = root.attribute;
  node.threshold = root.threshold;
  node.left = std::make_unique<TreeNode>(prune(*root.left, cf));
  node.right = std::make_unique<TreeNode>(prune(*root.right, cf));
  const auto n = node.total();
  const double as_leaf = static_cast<double>(n) * pessimistic_error(node.errors(), n, cf);
  if (as_leaf <= subtree_error(node, cf) + 1e-9) return TreeNode(node.counts);
  return node;
}

// --- growing ----------------------------------------------------------------

namespace {

TreeNode build(const TrainingData& data, std::vector<std::size_t> rows, const LearnerParams& params,
               std::size_t depth) {
  TreeNode node(count_rows(data, rows));
  if (params.max_depth && depth >= *params.max_depth) return node;
  const auto split = best_split(data, rows, params);
  if (!split) return node;
  const auto& column = data.columns[split->position];
  std::vector<std::size_t> left_rows, right_rows;
  for (auto r : rows) (column[r] <= split->threshold ? left_rows : right_rows).push_back(r);
  rows.clear();
  rows.shrink_to_fit();
  node.attribute = split->attribute;
  node.threshold = split->threshold;
  node.left = std::make_unique<TreeNode>(build(data, std::move(left_rows), params, depth + 1));
  node.right = std::make_unique<TreeNode>(build(data, std::move(right_rows), params, depth + 1));
  return node;
}

}  // namespace

TreeModel grow_unpruned(const Dataset& ds, const LearnerParams& params) {
  validate(params);
  if (ds.empty()) throw std::invalid_argument("cannot grow a tree from an empty dataset");
  const auto data = TrainingData::from(ds);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeModel model;
  model.root = build(data, std::move(rows), params, 0);
  model.params = params;
  model.schema = ds.schema();
  model.training_size = ds.size();
  model.training_counts = model.root.counts;
  return model;
}

TreeModel grow(const Dataset& ds, const LearnerParams& params) {
  auto model = grow_unpruned(ds, params);
  model.root = prune(model.root, params.confidence_factor);
  return model;
}

// --- prediction -------------------------------------------------------------

const TreeNode& route(const TreeModel& model, const CompanyRecord& record) {
  for (auto j : model.schema) {
    if (!std::isfinite(record.v[j])) {
      throw std::invalid_argument("record lacks a value for " + attribute_name(j));
    }
  }
  const TreeNode* node = &model.root;
  while (!node->is_leaf()) {
    node = record.v[node->attribute] <= node->threshold ? node->left.get() : node->right.get();
  }
  return *node;
}

Prediction predict(const TreeModel& model, const CompanyRecord& record) {
  const auto& leaf = route(model, record);
  Prediction out;
  out.label = leaf.predicted();
  const auto n = static_cast<double>(leaf.total());
  for (std::size_t c = 0; c < kNumClasses; ++c) out.probabilities[c] = static_cast<double>(leaf.counts[c]) / n;
  return out;
}

}  // namespace solvency
