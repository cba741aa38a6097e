#include "solvency/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "solvency/errors.hpp"

namespace solvency {

namespace {

double entropy_of(const std::map<std::size_t, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [key, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

std::vector<std::size_t> equal_frequency_bins(std::span<const double> values, std::size_t n_bins) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<std::size_t> bins(n);
  std::size_t current = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (rank == 0 || values[order[rank]] != values[order[rank - 1]]) current = rank * n_bins / n;
    bins[order[rank]] = current;
  }
  return bins;
}

DiscretizedView discretize(const Dataset& ds, std::size_t n_bins) {
  if (n_bins < 2) throw std::invalid_argument("n_bins must be at least 2");
  DiscretizedView view;
  view.n_bins = n_bins;
  view.schema = ds.schema();
  view.classes.reserve(ds.size());
  for (const auto& rec : ds.records()) {
    if (!rec.label) throw StateError("feature selection needs labeled records");
    view.classes.push_back(class_index(*rec.label));
  }
  std::vector<double> column(ds.size());
  for (auto attr : ds.schema()) {
    for (std::size_t i = 0; i < ds.size(); ++i) column[i] = ds[i].v[attr];
    view.bins.push_back(equal_frequency_bins(column, n_bins));
  }
  return view;
}

double symmetric_uncertainty(std::span<const std::size_t> x, std::span<const std::size_t> y) {
  if (x.size() != y.size()) throw std::invalid_argument("symmetric_uncertainty: length mismatch");
  if (x.empty()) throw std::invalid_argument("symmetric_uncertainty: empty input");
  std::map<std::size_t, std::size_t> cx, cy;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cx[x[i]];
    ++cy[y[i]];
    ++cxy[{x[i], y[i]}];
  }
  const double n = static_cast<double>(x.size());
  const double hx = entropy_of(cx, n);
  const double hy = entropy_of(cy, n);
  if (hx + hy <= 0.0) return 0.0;
  double hxy = 0.0;
  for (const auto& [key, count] : cxy) {
    const double p = static_cast<double>(count) / n;
    hxy -= p * std::log2(p);
  }
  const double mutual = std::max(0.0, hx + hy - hxy);
  return std::clamp(2.0 * mutual / (hx + hy), 0.0, 1.0);
}

double cfs_merit(std::span<const std::size_t> subset, const DiscretizedView& view) {
  if (subset.empty()) throw std::invalid_argument("cfs_merit: empty subset");
  const auto k = static_cast<double>(subset.size());
  double rcf = 0.0;
  for (auto a : subset) rcf += symmetric_uncertainty(view.bins.at(a), view.classes);
  rcf /= k;
  double rff = 0.0;
  if (subset.size() > 1) {
    for (std::size_t i = 0; i < subset.size(); ++i) {
      for (std::size_t j = i + 1; j < subset.size(); ++j) {
        rff += symmetric_uncertainty(view.bins.at(subset[i]), view.bins.at(subset[j]));
      }
    }
    rff /= k * (k - 1.0) / 2.0;
  }
  return k * rcf / std::sqrt(k + k * (k - 1.0) * rff);
}

FeatureSubset greedy_stepwise(const DiscretizedView& view) {
  if (view.schema.empty()) throw std::invalid_argument("greedy_stepwise: no attributes");
  std::vector<std::size_t> chosen;
  std::vector<bool> used(view.schema.size(), false);
  double current = 0.0;
  FeatureSubset result;
  while (chosen.size() < view.schema.size()) {
    std::optional<std::size_t> best;
    double best_merit = 0.0;
    for (std::size_t a = 0; a < view.schema.size(); ++a) {
      if (used[a]) continue;
      auto candidate = chosen;
      candidate.push_back(a);
      const double merit = cfs_merit(candidate, view);
      if (!best || merit > best_merit) {
        best = a;
        best_merit = merit;
      }
    }
    if (!chosen.empty() && !(best_merit > current)) break;
    chosen.push_back(*best);
    used[*best] = true;
    current = best_merit;
    result.merit_trace.push_back(current);
  }
  for (auto a : chosen) {
    result.attributes.push_back(view.schema[a]);
    result.selected.push_back(attribute_name(view.schema[a]));
  }
  result.merit = current;
  return result;
}

FeatureSubset greedy_stepwise(const Dataset& ds, std::size_t n_bins) {
  return greedy_stepwise(discretize(ds, n_bins));
}

}  // namespace solvency
