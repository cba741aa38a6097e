#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "solvency/dataset.hpp"

namespace solvency {

enum class BalanceMode { Resample, Smote };

struct BalanceTargets {
  BalanceMode mode = BalanceMode::Resample;
  double bias_to_uniform = 1.0;      // Resample
  double sample_size_percent = 100;  // Resample
  ClassCounts target_counts{};       // Smote
  std::size_t k_neighbors = 5;       // Smote
  std::uint64_t seed = 0;
};

// Sampling with replacement. Draws round(percent/100 * |ds|) records; each draw
// picks class c with probability (1 - B) n_c / |ds| + B / 4, then a uniform
// member of that class. Throws SamplingError when a class with no members has
// positive probability, std::invalid_argument for B outside [0, 1] or percent <= 0.
Dataset resample(const Dataset& ds, double bias_to_uniform, double sample_size_percent, std::uint64_t seed);

// Positions into `pool` of the k nearest points to `query` by Euclidean
// distance over `schema`, nearest first, ties in pool order.
std::vector<std::size_t> nearest_neighbors(const CompanyRecord& query, std::span<const CompanyRecord> pool,
                                           std::size_t k, std::span<const std::size_t> schema);

// Appends target_counts[c] - n_c synthetic records per class. Seeds cycle over
// the class members in dataset order; each synthetic point lies on the segment
// between its seed and one of the seed's k nearest same-class neighbours.
// CAR is interpolated with the same factor, so it stays inside the class band.
// When `parents` is given it receives, per synthetic record, the input indices
// of its seed and neighbour.
Dataset smote(const Dataset& ds, const ClassCounts& target_counts, std::size_t k_neighbors, std::uint64_t seed,
              std::vector<std::pair<std::size_t, std::size_t>>* parents = nullptr);

Dataset apply_balance(const Dataset& ds, const BalanceTargets& targets);

}  // namespace solvency
