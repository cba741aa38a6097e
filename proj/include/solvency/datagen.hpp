#pragma once

#include <cstdint>

#include "solvency/dataset.hpp"

namespace solvency {

struct GeneratorSpec {
  ClassCounts class_counts{44, 13, 16, 543};
  // Spacing of class means, in within-class standard deviations.
  double separation = 6.0;
  std::size_t n_attributes = kNumAttributes;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument for an out-of-range spec.
void validate(const GeneratorSpec& spec);

// Synthetic insurer-years with Gaussian class-conditional attributes. Class c
// has mean c * separation (sign alternating by attribute) on the first
// ceil(n_attributes / 2) attributes; the rest are N(0, 1) noise. CAR is uniform
// inside the class band (Insolvency [40, 100), Strong [150, 400)), and
// tca/tcr are consistent with it. Output order is a seeded shuffle.
Dataset generate(const GeneratorSpec& spec);

}  // namespace solvency
