#include "solvency/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "solvency/errors.hpp"
#include "solvency/random.hpp"

namespace solvency {

Dataset resample(const Dataset& ds, double bias_to_uniform, double sample_size_percent, std::uint64_t seed) {
  if (!(bias_to_uniform >= 0.0 && bias_to_uniform <= 1.0)) {
    throw std::invalid_argument("bias_to_uniform must lie in [0, 1]");
  }
  if (!(sample_size_percent > 0.0) || !std::isfinite(sample_size_percent)) {
    throw std::invalid_argument("sample_size_percent must be positive");
  }
  const auto members = indices_by_class(ds);
  const auto total = static_cast<double>(ds.size());
  std::array<double, kNumClasses> probability{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double empirical = ds.empty() ? 0.0 : static_cast<double>(members[c].size()) / total;
    probability[c] = (1.0 - bias_to_uniform) * empirical + bias_to_uniform / static_cast<double>(kNumClasses);
    if (probability[c] > 0.0 && members[c].empty()) {
      throw SamplingError("cannot draw class '" + std::string(to_string(class_at(c))) + "': it has no members");
    }
  }
  std::array<double, kNumClasses> cumulative{};
  std::partial_sum(probability.begin(), probability.end(), cumulative.begin());

  const auto draws = static_cast<std::size_t>(std::llround(sample_size_percent / 100.0 * total));
  Rng rng(derive_seed(seed, 0x5E5A));
  std::vector<std::size_t> picked;
  picked.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double u = rng.uniform01() * cumulative.back();
    std::size_t c = 0;
    while (c + 1 < kNumClasses && u >= cumulative[c]) ++c;
    picked.push_back(members[c][rng.uniform_index(members[c].size())]);
  }
  return ds.subset(picked);
}

namespace {

double squared_distance(const CompanyRecord& a, const CompanyRecord& b, std::span<const std::size_t> schema) {
  double d = 0.0;
  for (auto j : schema) {
    const double diff = a.v[j] - b.v[j];
    d += diff * diff;
  }
  return d;
}

double between(double from, double to, double u) {
  const double x = from + u * (to - from);
  return std::clamp(x, std::min(from, to), std::max(from, to));
}

}  // namespace

std::vector<std::size_t> nearest_neighbors(const CompanyRecord& query, std::span<const CompanyRecord> pool,
                                           std::size_t k, std::span<const std::size_t> schema) {
  if (pool.empty()) throw std::invalid_argument("nearest_neighbors: empty pool");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) scored.emplace_back(squared_distance(query, pool[i], schema), i);
  const auto keep = std::min(k, pool.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end());
  std::vector<std::size_t> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(scored[i].second);
  return out;
}

Dataset smote(const Dataset& ds, const ClassCounts& target_counts, std::size_t k_neighbors, std::uint64_t seed,
              std::vector<std::pair<std::size_t, std::size_t>>* parents) {
  if (k_neighbors < 1) throw std::invalid_argument("k_neighbors must be at least 1");
  const auto members = indices_by_class(ds);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto name = std::string(to_string(class_at(c)));
    if (target_counts[c] < members[c].size()) {
      throw std::invalid_argument("target for class '" + name + "' is below its current count " +
                                  std::to_string(members[c].size()));
    }
    if (target_counts[c] > members[c].size() && members[c].size() < 2) {
      throw InsufficientClassError("class '" + name + "' needs at least 2 members for SMOTE, has " +
                                   std::to_string(members[c].size()));
    }
  }

  std::vector<CompanyRecord> out = ds.records();
  if (parents) parents->clear();
  const auto& schema = ds.schema();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& idx = members[c];
    const std::size_t deficit = target_counts[c] - idx.size();
    if (deficit == 0) continue;
    std::vector<CompanyRecord> pool_records;
    pool_records.reserve(idx.size());
    for (auto i : idx) pool_records.push_back(ds[i]);

    // Neighbour lists per class member, positions into pool_records.
    std::vector<std::vector<std::size_t>> neighbours(idx.size());
    std::vector<CompanyRecord> others;
    std::vector<std::size_t> others_pos;
    for (std::size_t m = 0; m < idx.size(); ++m) {
      others.clear();
      others_pos.clear();
      for (std::size_t o = 0; o < idx.size(); ++o) {
        if (o == m) continue;
        others.push_back(pool_records[o]);
        others_pos.push_back(o);
      }
      for (auto p : nearest_neighbors(pool_records[m], others, k_neighbors, schema)) {
        neighbours[m].push_back(others_pos[p]);
      }
    }

    Rng rng(derive_seed(seed, c));
    for (std::size_t s = 0; s < deficit; ++s) {
      const std::size_t m = s % idx.size();
      const auto& base = pool_records[m];
      const std::size_t nb = neighbours[m][rng.uniform_index(neighbours[m].size())];
      const auto& near = pool_records[nb];
      if (parents) parents->emplace_back(idx[m], idx[nb]);
      const double u = rng.uniform_closed01();
      CompanyRecord synth;
      synth.label = class_at(c);
      synth.car = between(base.car, near.car, u);
      for (auto j : schema) synth.v[j] = between(base.v[j], near.v[j], u);
      out.push_back(std::move(synth));
    }
  }
  return Dataset(schema, std::move(out));
}

Dataset apply_balance(const Dataset& ds, const BalanceTargets& targets) {
  switch (targets.mode) {
    case BalanceMode::Resample:
      return resample(ds, targets.bias_to_uniform, targets.sample_size_percent, targets.seed);
    case BalanceMode::Smote:
      return smote(ds, targets.target_counts, targets.k_neighbors, targets.seed);
  }
  throw std::invalid_argument("unknown balance mode");
}

}  // namespace solvency
