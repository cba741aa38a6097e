#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solvency/dataset.hpp"

namespace solvency {

struct LearnerParams {
  double confidence_factor = 0.25;
  std::size_t min_leaf = 2;
  std::optional<std::size_t> max_depth;

  friend bool operator==(const LearnerParams&, const LearnerParams&) = default;
};

// Throws std::invalid_argument unless cf lies in (0, 0.5] and min_leaf >= 1.
void validate(const LearnerParams& params);

// A leaf when it has no children. `counts` holds the training records routed
// to the node; for split nodes this equals the sum over its children.
struct TreeNode {
  ClassCounts counts{};
  std::size_t attribute = 0;  // split nodes only
  double threshold = 0.0;     // records with value <= threshold go left
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  TreeNode() = default;
  explicit TreeNode(const ClassCounts& c) : counts(c) {}
  TreeNode(const TreeNode& other);
  TreeNode& operator=(const TreeNode& other);
  TreeNode(TreeNode&&) noexcept = default;
  TreeNode& operator=(TreeNode&&) noexcept = default;

  bool is_leaf() const noexcept { return !left; }
  // argmax of counts, ties to the earlier class.
  SolvencyClass predicted() const noexcept;
  std::size_t total() const noexcept;
  std::size_t errors() const noexcept { return total() - counts[class_index(predicted())]; }

  std::size_t node_count() const noexcept;
  std::size_t leaf_count() const noexcept;
  std::size_t depth() const noexcept;

  friend bool operator==(const TreeNode& a, const TreeNode& b) noexcept;
};

struct TreeModel {
  TreeNode root;
  LearnerParams params;
  std::vector<std::size_t> schema;
  std::size_t training_size = 0;
  ClassCounts training_counts{};

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

// Column-major numeric copy of a labeled dataset for split search.
struct TrainingData {
  std::vector<std::size_t> schema;
  std::vector<std::vector<double>> columns;  // columns[position][row]
  std::vector<std::size_t> labels;           // class index per row

  static TrainingData from(const Dataset& ds);
  std::size_t size() const noexcept { return labels.size(); }
};

// Entropy in bits of a count vector. Throws std::invalid_argument if all zero.
double entropy(std::span<const std::size_t> counts);

struct SplitCandidate {
  std::size_t position = 0;   // index into the schema
  std::size_t attribute = 0;  // attribute index (0 = V1)
  double threshold = 0.0;
  double gain = 0.0;
  double gain_ratio = 0.0;
  std::size_t n_left = 0;
  std::size_t n_right = 0;
};

// Binary threshold split on an occurring value. Candidates must leave at least
// min_leaf records on each side; among those whose gain reaches the mean gain
// of all candidates, the highest gain ratio wins, ties to the earlier
// attribute and then the smaller threshold. None for pure nodes, nodes with
// no admissible candidate, or when no candidate carries positive gain.
std::optional<SplitCandidate> best_split(const TrainingData& data, std::span<const std::size_t> rows,
                                         const LearnerParams& params);
std::optional<SplitCandidate> best_split(const TrainingData& data, const LearnerParams& params);

// Upper confidence limit p with P[Binomial(n, p) <= e] = cf, by bisection.
// Throws std::invalid_argument for cf outside (0, 1), n == 0 or e > n.
double pessimistic_error(std::size_t e, std::size_t n, double cf);

// Bottom-up error-based pruning: a subtree becomes a leaf when the leaf's
// estimated errors do not exceed the sum over its leaves.
TreeNode prune(const TreeNode& root, double cf);

// Recursive partitioning without pruning.
TreeModel grow_unpruned(const Dataset& ds, const LearnerParams& params = {});
// grow_unpruned followed by prune at params.confidence_factor.
TreeModel grow(const Dataset& ds, const LearnerParams& params = {});

struct Prediction {
  SolvencyClass label = SolvencyClass::Strong;
  std::array<double, kNumClasses> probabilities{};
};

// Throws std::invalid_argument if the record lacks a finite schema value.
Prediction predict(const TreeModel& model, const CompanyRecord& record);
// Leaf reached by the record.
const TreeNode& route(const TreeModel& model, const CompanyRecord& record);

// Line-oriented model file; thresholds carry 17 significant digits.
void serialize(const TreeModel& model, std::ostream& out);
std::string serialize(const TreeModel& model);
// Throws ParseError with the offending line number.
TreeModel parse_model(std::istream& in);
TreeModel parse_model(const std::string& text);

// Indented "V3 <= 1.5" rendering; leaves list counts in I/W/M/S order.
std::string render(const TreeModel& model);

}  // namespace solvency
