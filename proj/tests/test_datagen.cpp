#include <doctest.h>

#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "solvency/datagen.hpp"

using namespace solvency;

namespace {

std::string csv_of(const Dataset& ds) {
  std::ostringstream out;
  write_csv(out, ds);
  return out.str();
}

}  // namespace

TEST_CASE("generate emits the requested class counts") {
  auto ds = generate({{44, 13, 16, 543}, 6.0, 11, 7});
  CHECK(ds.size() == 616);
  CHECK(class_distribution(ds) == ClassCounts{44, 13, 16, 543});
  CHECK(ds.schema().size() == 11);
}

TEST_CASE("an all-Strong spec") {
  auto ds = generate({{0, 0, 0, 5}, 6.0, 3, 1});
  REQUIRE(ds.size() == 5);
  for (const auto& r : ds.records()) {
    CHECK(r.label == SolvencyClass::Strong);
    CHECK(r.car >= 150.0);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const GeneratorSpec spec{{44, 13, 16, 543}, 6.0, 11, 42};
  CHECK(csv_of(generate(spec)) == csv_of(generate(spec)));
  auto other = spec;
  other.seed = 43;
  CHECK(csv_of(generate(spec)) != csv_of(generate(other)));
}

TEST_CASE("every generated record is valid and consistent with its CAR") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratorSpec spec{{5 + seed, 3, 4, 30}, static_cast<double>(seed % 7), 1 + seed % 11, seed};
    auto ds = generate(spec);
    for (const auto& r : ds.records()) {
      REQUIRE(r.label.has_value());
      CHECK(label_from_car(r.car) == *r.label);
      REQUIRE(r.tca.has_value());
      REQUIRE(r.tcr.has_value());
      CHECK(100.0 * *r.tca / *r.tcr == doctest::Approx(r.car).epsilon(1e-9));
      CHECK(r.car >= 40.0);
    }
    // Survives the CSV validator with labels re-derived from CAR.
    std::istringstream in(csv_of(ds));
    CHECK(load_csv(in) == ds);
  }
}

TEST_CASE("well separated data is perfectly fit by a shallow exhaustive tree") {
  // One informative attribute: a depth-2 threshold tree must separate all four classes.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ds = generate({{6, 6, 6, 6}, 6.0, 2, seed});
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> labels;
    for (const auto& r : ds.records()) {
      rows.push_back({r.v[0], r.v[1]});
      labels.push_back(class_index(*r.label));
    }
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    CHECK(oracle::min_tree_errors(rows, labels, idx, 2) == 0);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(generate({{1, 1, 1, 1}, 1.0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate({{1, 1, 1, 1}, 1.0, 12, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate({{1, 1, 1, 1}, -1.0, 3, 1}), std::invalid_argument);
}
