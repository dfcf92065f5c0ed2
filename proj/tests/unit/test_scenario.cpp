#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "coa/scenario.hpp"
#include "test_support.hpp"

using namespace coa;

namespace {

Scenario minimal() {
  Scenario s;
  s.name = "minimal";
  s.benefit = 10;
  s.layers = {{1, "outer"}};
  s.mitigations = {{1, "m1", 5}};
  s.defense_strategies = {{0, "none", {}}, {1, "all", {1}}};
  s.attack_strategies = {{1, "a1", {{std::nullopt, 2, 1.0, ""}}, {{1, 1, 1, 0.5, ""}}}};
  return s;
}

bool has_defect(const ValidationReport& r, const std::string& path) {
  return std::any_of(r.defects.begin(), r.defects.end(),
                     [&](const Defect& d) { return d.path == path; });
}

}  // namespace

TEST_CASE("the bundled AQUA scenario validates") {
  const auto s = testing::load_aqua();
  CHECK(validate(s).ok());
  CHECK(s.attack_strategies.size() == 5);
  CHECK(s.defense_strategies.size() == 5);
  CHECK(s.mitigations.size() == 15);
  CHECK(s.layers.size() == 4);
}

TEST_CASE("empty strategy lists are each reported") {
  Scenario s = minimal();
  s.layers.clear();
  s.defense_strategies.clear();
  s.attack_strategies.clear();
  const auto r = validate(s);
  REQUIRE(r.defects.size() >= 3);
  CHECK(has_defect(r, "layers"));
  CHECK(has_defect(r, "defense_strategies"));
  CHECK(has_defect(r, "attack_strategies"));
}

TEST_CASE("probabilities outside [0, 1] are rejected with their path") {
  Scenario s = minimal();
  s.attack_strategies[0].differential_effects[0].success_prob = 1.2;
  s.attack_strategies[0].fixed_terms[0].success_prob = -0.1;
  const auto r = validate(s);
  CHECK(has_defect(r, "attack_strategies[0].differential_effects[0].success_prob"));
  CHECK(has_defect(r, "attack_strategies[0].fixed_terms[0].success_prob"));
}

TEST_CASE("non-finite and negative amounts are rejected") {
  Scenario s = minimal();
  s.mitigations[0].cost = -1;
  s.attack_strategies[0].fixed_terms[0].cost = std::numeric_limits<double>::quiet_NaN();
  const auto r = validate(s);
  CHECK(has_defect(r, "mitigations[0].cost"));
  CHECK(has_defect(r, "attack_strategies[0].fixed_terms[0].cost"));
}

TEST_CASE("unknown references and duplicate ids are reported together") {
  Scenario s = minimal();
  s.defense_strategies[1].mitigation_ids.insert(9);
  s.attack_strategies[0].differential_effects.push_back({7, 1, 0, 1, ""});
  s.attack_strategies[0].differential_effects.push_back({1, 3, 0, 1, ""});
  s.attack_strategies.push_back(s.attack_strategies[0]);
  const auto r = validate(s);
  CHECK(has_defect(r, "defense_strategies[1].mitigation_ids"));
  CHECK(has_defect(r, "attack_strategies[0].differential_effects[1].mitigation_id"));
  CHECK(has_defect(r, "attack_strategies[0].differential_effects[2].layer"));
  CHECK(has_defect(r, "attack_strategies[1].id"));
}

TEST_CASE("a repeated (mitigation, layer) effect is ambiguous") {
  Scenario s = minimal();
  s.attack_strategies[0].differential_effects.push_back({1, 1, 3, 0.2, ""});
  const auto r = validate(s);
  CHECK(has_defect(r, "attack_strategies[0].differential_effects[1]"));
}

TEST_CASE("fixed terms may name an unknown layer only as an error") {
  Scenario s = minimal();
  s.attack_strategies[0].fixed_terms.push_back({4, 1, 1, ""});
  CHECK(has_defect(validate(s), "attack_strategies[0].fixed_terms[1].layer"));
}

TEST_CASE("require_valid carries the report") {
  Scenario s = minimal();
  s.benefit = -5;
  try {
    require_valid(s);
    FAIL("expected InvalidScenario");
  } catch (const InvalidScenario& e) {
    CHECK_FALSE(e.report().ok());
  }
}

TEST_CASE("AQUA translation matrix rows and strategy costs") {
  const auto s = testing::load_aqua();
  const auto t = build_translation_matrix(s);
  const std::vector<std::vector<int>> expected = {
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
      {1, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 0},
      {1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 1, 0},
      {1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 0},
      {1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
  };
  REQUIRE(t.rows.size() == expected.size());
  for (std::size_t j = 0; j < expected.size(); ++j) {
    for (std::size_t m = 0; m < 15; ++m) {
      CHECK(static_cast<int>(t.rows[j][m]) == expected[j][m]);
    }
  }
  CHECK(t.row_sum(0) == 0);
  CHECK(t.row_sum(4) == 14);

  for (std::size_t j = 0; j < s.defense_strategies.size(); ++j) {
    double cost = 0;
    for (std::size_t m = 0; m < s.mitigations.size(); ++m) cost += t.rows[j][m] * s.mitigations[m].cost;
    CHECK(cost == doctest::Approx(testing::kAquaStrategyCosts[j]).epsilon(1e-12));
  }
}

TEST_CASE("translation matrix refuses an invalid scenario") {
  Scenario s = minimal();
  s.defense_strategies[0].mitigation_ids.insert(42);
  CHECK_THROWS_AS(build_translation_matrix(s), InvalidScenario);
}
