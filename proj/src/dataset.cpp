#include "solvency/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "solvency/errors.hpp"
#include "solvency/random.hpp"

namespace solvency {

std::string_view to_string(SolvencyClass c) noexcept {
  switch (c) {
    case SolvencyClass::Insolvency: return "insolvency";
    case SolvencyClass::Weak: return "weak";
    case SolvencyClass::Moderate: return "moderate";
    case SolvencyClass::Strong: return "strong";
  }
  return "?";
}

std::string_view to_string(ActionLevel a) noexcept {
  switch (a) {
    case ActionLevel::NoAction: return "no-action";
    case ActionLevel::CompanyAction: return "company-action";
    case ActionLevel::RegulatoryAction: return "regulatory-action";
    case ActionLevel::AuthorizedControl: return "authorized-control";
  }
  return "?";
}

char class_code(SolvencyClass c) noexcept { return "IWMS"[class_index(c)]; }

SolvencyClass parse_class(std::string_view name) {
  for (auto c : kClassAlphabet) {
    if (to_string(c) == name) return c;
  }
  throw InvalidValue("unknown solvency class '" + std::string(name) + "'");
}

SolvencyClass label_from_car(double car) {
  if (!std::isfinite(car)) throw InvalidValue("CAR must be a finite number");
  if (car >= 150.0) return SolvencyClass::Strong;
  if (car >= 120.0) return SolvencyClass::Moderate;
  if (car >= 100.0) return SolvencyClass::Weak;
  return SolvencyClass::Insolvency;
}

std::string attribute_name(std::size_t index) { return "V" + std::to_string(index + 1); }

std::optional<std::size_t> parse_attribute_name(std::string_view name) {
  if (name.size() < 2 || name.size() > 3 || name[0] != 'V') return std::nullopt;
  std::size_t value = 0;
  for (char ch : name.substr(1)) {
    if (ch < '0' || ch > '9') return std::nullopt;
    value = value * 10 + static_cast<std::size_t>(ch - '0');
  }
  if (name[1] == '0' || value < 1 || value > kNumAttributes) return std::nullopt;
  return value - 1;
}

namespace {

bool same_double(double a, double b) noexcept { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) noexcept {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_double(*a, *b);
}

}  // namespace

bool operator==(const CompanyRecord& a, const CompanyRecord& b) noexcept {
  if (a.company_id != b.company_id || a.year != b.year || a.label != b.label) return false;
  if (!same_optional(a.tca, b.tca) || !same_optional(a.tcr, b.tcr) || !same_double(a.car, b.car)) {
    return false;
  }
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    if (!same_double(a.v[j], b.v[j])) return false;
  }
  return true;
}

Dataset::Dataset(std::vector<std::size_t> schema, std::vector<CompanyRecord> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i] >= kNumAttributes) throw std::invalid_argument("schema attribute out of range");
    if (i > 0 && schema_[i] <= schema_[i - 1]) {
      throw std::invalid_argument("schema must be strictly increasing attribute indices");
    }
  }
  for (std::size_t r = 0; r < records_.size(); ++r) {
    for (auto j : schema_) {
      if (!std::isfinite(records_[r].v[j])) {
        throw std::invalid_argument("record " + std::to_string(r) + " lacks a finite value for " +
                                    attribute_name(j));
      }
    }
  }
}

std::vector<std::string> Dataset::schema_names() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (auto j : schema_) names.push_back(attribute_name(j));
  return names;
}

bool Dataset::has_attribute(std::size_t index) const noexcept {
  return std::binary_search(schema_.begin(), schema_.end(), index);
}

bool Dataset::fully_labeled() const noexcept {
  return std::all_of(records_.begin(), records_.end(), [](const auto& r) { return r.label.has_value(); });
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<CompanyRecord> picked;
  picked.reserve(indices.size());
  for (auto i : indices) picked.push_back(records_.at(i));
  Dataset out;
  out.schema_ = schema_;
  out.records_ = std::move(picked);
  return out;
}

Dataset Dataset::project(std::vector<std::size_t> schema) const {
  std::sort(schema.begin(), schema.end());
  for (auto j : schema) {
    if (!has_attribute(j)) throw std::invalid_argument(attribute_name(j) + " is not in the dataset schema");
  }
  std::vector<CompanyRecord> projected = records_;
  for (auto& rec : projected) {
    for (std::size_t j = 0; j < kNumAttributes; ++j) {
      if (!std::binary_search(schema.begin(), schema.end(), j)) rec.v[j] = kAbsent;
    }
  }
  return Dataset(std::move(schema), std::move(projected));
}

ClassCounts class_distribution(const Dataset& ds) {
  ClassCounts counts{};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& label = ds[i].label;
    if (!label) throw StateError("record " + std::to_string(i) + " is unlabeled");
    ++counts[class_index(*label)];
  }
  return counts;
}

std::array<std::vector<std::size_t>, kNumClasses> indices_by_class(const Dataset& ds) {
  std::array<std::vector<std::size_t>, kNumClasses> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& label = ds[i].label;
    if (!label) throw StateError("record " + std::to_string(i) + " is unlabeled");
    out[class_index(*label)].push_back(i);
  }
  return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  auto by_class = indices_by_class(ds);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  // Exact halves alternate up and down across classes so that the two sides
  // stay balanced when many classes are tiny.
  bool round_half_up = true;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& members = by_class[c];
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::size_t>(members));
    const auto n = members.size();
    const double exact = train_fraction * static_cast<double>(n);
    auto wanted = std::lround(exact);
    if (exact - std::floor(exact) == 0.5) {
      wanted = static_cast<long>(round_half_up ? std::ceil(exact) : std::floor(exact));
      round_half_up = !round_half_up;
    }
    const auto n_train = static_cast<std::size_t>(std::clamp<long>(wanted, 0, static_cast<long>(n)));
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {ds.subset(train), ds.subset(test)};
}

}  // namespace solvency
