#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace solvency {

// Solvency position under the CAR system, in the fixed class order used by
// every dataset, fold, matrix and model.
enum class SolvencyClass : std::uint8_t { Insolvency = 0, Weak = 1, Moderate = 2, Strong = 3 };

enum class ActionLevel : std::uint8_t { NoAction, CompanyAction, RegulatoryAction, AuthorizedControl };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<SolvencyClass, kNumClasses> kClassAlphabet = {
    SolvencyClass::Insolvency, SolvencyClass::Weak, SolvencyClass::Moderate, SolvencyClass::Strong};

using ClassCounts = std::array<std::size_t, kNumClasses>;

constexpr std::size_t class_index(SolvencyClass c) noexcept { return static_cast<std::size_t>(c); }
constexpr SolvencyClass class_at(std::size_t i) noexcept { return static_cast<SolvencyClass>(i); }

constexpr ActionLevel action_level(SolvencyClass c) noexcept {
  switch (c) {
    case SolvencyClass::Strong: return ActionLevel::NoAction;
    case SolvencyClass::Moderate: return ActionLevel::CompanyAction;
    case SolvencyClass::Weak: return ActionLevel::RegulatoryAction;
    case SolvencyClass::Insolvency: break;
  }
  return ActionLevel::AuthorizedControl;
}

// "insolvency" | "weak" | "moderate" | "strong"
std::string_view to_string(SolvencyClass c) noexcept;
std::string_view to_string(ActionLevel a) noexcept;
// Single-letter code used in report tables: I, W, M, S.
char class_code(SolvencyClass c) noexcept;
// Accepts the lowercase names; throws InvalidValue otherwise.
SolvencyClass parse_class(std::string_view name);

// Bands are lower-inclusive, upper-exclusive: [150, inf) Strong, [120, 150)
// Moderate, [100, 120) Weak, below 100 Insolvency. Throws InvalidValue on
// NaN or infinity.
SolvencyClass label_from_car(double car);

// Financial ratio attributes V1..V11, addressed by zero-based index.
inline constexpr std::size_t kNumAttributes = 11;
using AttributeVector = std::array<double, kNumAttributes>;
inline constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

std::string attribute_name(std::size_t index);
// "V1".."V11" -> 0..10, nullopt for anything else.
std::optional<std::size_t> parse_attribute_name(std::string_view name);

// One insurer-year. Synthetic (SMOTE) records have no company_id and no year.
struct CompanyRecord {
  std::string company_id;
  std::optional<int> year;
  std::optional<double> tca;
  std::optional<double> tcr;
  double car = 0.0;
  AttributeVector v = filled_absent();
  std::optional<SolvencyClass> label;

  bool synthetic() const noexcept { return company_id.empty() && !year.has_value(); }

  // Field-wise equality; absent (NaN) attribute slots compare equal.
  friend bool operator==(const CompanyRecord& a, const CompanyRecord& b) noexcept;

  static AttributeVector filled_absent() noexcept {
    AttributeVector out;
    out.fill(kAbsent);
    return out;
  }
};

// Ordered records sharing a schema: a sorted subset of attribute indices.
// Every record carries a finite value for every schema attribute.
class Dataset {
 public:
  Dataset() = default;
  // Throws std::invalid_argument if the schema is not a strictly increasing
  // list of attribute indices or a record lacks a finite schema value.
  Dataset(std::vector<std::size_t> schema, std::vector<CompanyRecord> records);

  const std::vector<std::size_t>& schema() const noexcept { return schema_; }
  const std::vector<CompanyRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const CompanyRecord& operator[](std::size_t i) const { return records_[i]; }

  std::vector<std::string> schema_names() const;
  bool has_attribute(std::size_t index) const noexcept;
  bool fully_labeled() const noexcept;

  // Same records restricted to `indices` (kept in the given order).
  Dataset subset(const std::vector<std::size_t>& indices) const;
  // Same records with the schema narrowed; `schema` must be a subset of the current one.
  Dataset project(std::vector<std::size_t> schema) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::size_t> schema_;
  std::vector<CompanyRecord> records_;
};

// Counts per class in alphabet order. Throws StateError on an unlabeled record.
ClassCounts class_distribution(const Dataset& ds);

// Record indices per class, each list in dataset order.
std::array<std::vector<std::size_t>, kNumClasses> indices_by_class(const Dataset& ds);

// Per-class split keeping round(train_fraction * n_c) records of class c in the
// training side. Both sides keep input order. Deterministic in `seed`.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

struct LoadOptions {
  // Derive missing labels from CAR. Without it, rows without a class stay unlabeled.
  bool expect_labels = true;
  // Resampled data legitimately repeats (company_id, year) keys.
  bool allow_duplicate_keys = false;
};

// Columns: company_id, year, tca, tcr, car, V1..V11, class. tca/tcr or car may
// be blank (not both); the V columns present form the schema; class is optional.
// Throws ParseError carrying the 1-based line number and column name.
Dataset load_csv(std::istream& in, const LoadOptions& options = {});
Dataset load_csv_file(const std::string& path, const LoadOptions& options = {});

// Writes every column of the schema above, restricting V columns to the
// dataset schema. Doubles use shortest round-trip formatting.
void write_csv(std::ostream& out, const Dataset& ds);
void write_csv_file(const std::string& path, const Dataset& ds);

}  // namespace solvency
