#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "solvency/dataset.hpp"
#include "solvency/random.hpp"

namespace test {

// Records with the given attribute columns (schema V1..Vn) and class indices.
inline solvency::Dataset make_dataset(const std::vector<std::vector<double>>& columns,
                                      const std::vector<std::size_t>& labels) {
  std::vector<solvency::CompanyRecord> records;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    solvency::CompanyRecord r;
    r.company_id = "R" + std::to_string(i);
    r.year = 2000;
    r.car = 100.0;
    r.label = solvency::class_at(labels[i]);
    for (std::size_t a = 0; a < columns.size(); ++a) r.v[a] = columns[a][i];
    records.push_back(r);
  }
  std::vector<std::size_t> schema(columns.size());
  std::iota(schema.begin(), schema.end(), std::size_t{0});
  return solvency::Dataset(schema, records);
}

struct RandomTable {
  std::vector<std::vector<double>> columns;
  std::vector<std::size_t> labels;
};

// Small random instance; values drawn from a coarse grid so ties occur.
inline RandomTable random_table(solvency::Rng& rng, std::size_t max_records, std::size_t max_attributes,
                                std::size_t min_classes = 2, std::size_t max_classes = 4) {
  RandomTable t;
  const std::size_t n = 2 + rng.uniform_index(max_records - 1);
  const std::size_t m = 1 + rng.uniform_index(max_attributes);
  const std::size_t k = min_classes + rng.uniform_index(max_classes - min_classes + 1);
  t.columns.assign(m, std::vector<double>(n));
  for (auto& col : t.columns)
    for (auto& v : col) v = static_cast<double>(rng.uniform_index(6)) * 0.5 - 1.0;
  t.labels.resize(n);
  for (auto& l : t.labels) l = rng.uniform_index(k);
  return t;
}

}  // namespace test
