#include "solvency/datagen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "solvency/random.hpp"

namespace solvency {

namespace {

struct Band {
  double lo, hi;
};

constexpr std::array<Band, kNumClasses> kCarBands = {{{40.0, 100.0}, {100.0, 120.0}, {120.0, 150.0}, {150.0, 400.0}}};

}  // namespace

void validate(const GeneratorSpec& spec) {
  if (spec.n_attributes < 1 || spec.n_attributes > kNumAttributes) {
    throw std::invalid_argument("n_attributes must lie in [1, 11]");
  }
  if (!std::isfinite(spec.separation) || spec.separation < 0.0) {
    throw std::invalid_argument("separation must be finite and non-negative");
  }
}

Dataset generate(const GeneratorSpec& spec) {
  validate(spec);
  const std::size_t informative = (spec.n_attributes + 1) / 2;
  Rng rng(derive_seed(spec.seed, 0));

  std::vector<CompanyRecord> records;
  records.reserve(std::accumulate(spec.class_counts.begin(), spec.class_counts.end(), std::size_t{0}));
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto band = kCarBands[c];
    for (std::size_t i = 0; i < spec.class_counts[c]; ++i) {
      CompanyRecord rec;
      rec.label = class_at(c);
      // Snap into the band if rounding ever lands on the open upper edge.
      double car = rng.uniform(band.lo, band.hi);
      if (car >= band.hi) car = std::nextafter(band.hi, band.lo);
      rec.car = car;
      const double tcr = rng.uniform(50.0, 5000.0);
      rec.tcr = tcr;
      rec.tca = car * tcr / 100.0;
      for (std::size_t j = 0; j < spec.n_attributes; ++j) {
        double mean = 0.0;
        if (j < informative) mean = (j % 2 == 0 ? 1.0 : -1.0) * spec.separation * static_cast<double>(c);
        rec.v[j] = rng.normal(mean, 1.0);
      }
      records.push_back(std::move(rec));
    }
  }
  rng.shuffle(std::span<CompanyRecord>(records));
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].company_id = "G" + std::to_string(i + 1);
    records[i].year = 2000 + static_cast<int>(i % 9);
  }

  std::vector<std::size_t> schema(spec.n_attributes);
  std::iota(schema.begin(), schema.end(), std::size_t{0});
  return Dataset(std::move(schema), std::move(records));
}

}  // namespace solvency
