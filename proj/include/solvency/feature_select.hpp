#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "solvency/dataset.hpp"

namespace solvency {

// Equal-frequency bin assignments for every schema attribute plus the class
// column. Records with equal values always share a bin, so bin sizes differ by
// at most one only when values are distinct.
struct DiscretizedView {
  std::vector<std::size_t> schema;             // attribute indices, same order as `bins`
  std::vector<std::vector<std::size_t>> bins;  // bins[a][record]
  std::vector<std::size_t> classes;            // class index per record
  std::size_t n_bins = 10;

  std::size_t n_records() const noexcept { return classes.size(); }
};

// Rank-based bin index floor(rank * n_bins / n), ties take the bin of their first rank.
std::vector<std::size_t> equal_frequency_bins(std::span<const double> values, std::size_t n_bins);

// Throws std::invalid_argument when n_bins < 2; StateError on unlabeled records.
DiscretizedView discretize(const Dataset& ds, std::size_t n_bins = 10);

// 2 * I(x; y) / (H(x) + H(y)), 0 when both entropies vanish.
double symmetric_uncertainty(std::span<const std::size_t> x, std::span<const std::size_t> y);

// CFS merit k * mean_rcf / sqrt(k + k (k - 1) * mean_rff). `subset` holds
// positions into view.schema. Throws std::invalid_argument when empty.
double cfs_merit(std::span<const std::size_t> subset, const DiscretizedView& view);

struct FeatureSubset {
  std::vector<std::string> selected;  // attribute names, in selection order
  std::vector<std::size_t> attributes;
  double merit = 0.0;
  std::vector<double> merit_trace;  // merit after each admitted attribute
};

// Forward selection from the empty set; stops when no addition strictly
// improves merit. Ties go to the earlier schema attribute.
FeatureSubset greedy_stepwise(const DiscretizedView& view);
FeatureSubset greedy_stepwise(const Dataset& ds, std::size_t n_bins = 10);

}  // namespace solvency
