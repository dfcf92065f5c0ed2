#include <doctest.h>

#include "coa/game_analysis.hpp"
#include "coa/report.hpp"
#include "test_support.hpp"

using namespace coa;

namespace {

const MatrixBundle& aqua() {
  static const MatrixBundle bundle = compute_bundle(testing::load_aqua());
  return bundle;
}

MatrixBundle from_payoffs(const std::vector<std::vector<double>>& ua,
                          const std::vector<std::vector<double>>& ud) {
  MatrixBundle b;
  const auto rows = ua.size();
  const auto cols = ua[0].size();
  for (std::size_t i = 0; i < rows; ++i) b.attack_ids.push_back(static_cast<int>(i + 1));
  for (std::size_t j = 0; j < cols; ++j) b.defense_ids.push_back(static_cast<int>(j));
  b.benefit = 100;
  b.attacker_cost = Matrix(rows, cols);
  b.defender_cost = Matrix(rows, cols);
  b.penetration = Matrix(rows, cols, 0.5);
  b.attacker_utility = Matrix(rows, cols);
  b.defender_utility = Matrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      b.attacker_utility(i, j) = ua[i][j];
      b.defender_utility(i, j) = ud[i][j];
    }
  }
  return b;
}

}  // namespace

TEST_CASE("cost-utility criterion has no pure equilibrium on AQUA") {
  CHECK(find_pure_equilibria(aqua(), Criterion::cost_utility).empty());
}

TEST_CASE("penetration criterion has exactly (5,4)") {
  const auto eq = find_pure_equilibria(aqua(), Criterion::penetration_probability);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0] == StrategyPair{5, 4});
}

TEST_CASE("best-response sets keep ties") {
  const auto br = best_response_sets(aqua(), Criterion::penetration_probability);
  CHECK(br.attacker.at(0) == std::vector<int>{1, 2, 3});
  CHECK(br.defender.at(3) == std::vector<int>{1, 2, 3, 4});
  CHECK(br.defender.at(5) == std::vector<int>{1, 2, 3, 4});
  const auto cu = best_response_sets(aqua(), Criterion::cost_utility);
  CHECK(cu.attacker.at(0) == std::vector<int>{2});
  CHECK(cu.attacker.at(4) == std::vector<int>{5});
  CHECK(cu.defender.at(1) == std::vector<int>{4});
  CHECK(cu.defender.at(2) == std::vector<int>{3});
}

TEST_CASE("preference marks on AQUA, cost utility") {
  const auto grid = emit_preference_marks(aqua(), Criterion::cost_utility);
  const std::vector<std::vector<std::string>> expected = {
      {"", "", "A", "A", "D"},
      {"A", "A", "", "D", ""},
      {"", "D", "", "", ""},
      {"", "D", "", "", ""},
      {"", "D", "", "", "A"},
  };
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      INFO("cell (" << i + 1 << "," << j << ")");
      CHECK(std::string(mark_text(grid.cells[i][j])) == expected[i][j]);
    }
  }
}

TEST_CASE("preference marks on AQUA, penetration") {
  const auto grid = emit_preference_marks(aqua(), Criterion::penetration_probability);
  const std::vector<std::vector<std::string>> expected = {
      {"A", "A", "A", "A", "D"},
      {"A", "", "", "", "D"},
      {"A", "D", "D", "D", "D"},
      {"", "", "D", "D", "D"},
      {"", "D", "D", "D", "AD"},
  };
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      INFO("cell (" << i + 1 << "," << j << ")");
      CHECK(std::string(mark_text(grid.cells[i][j])) == expected[i][j]);
    }
  }
}

TEST_CASE("attacker maximin is i=5 with floor 210") {
  const auto r = maximin_strategy(aqua(), Player::attacker, Criterion::cost_utility);
  CHECK(r.chosen == std::vector<int>{5});
  REQUIRE(r.values.size() == 1);
  CHECK(r.values[0] == doctest::Approx(210));
  CHECK_FALSE(r.trace.empty());
}

TEST_CASE("defender maximin is j=4") {
  // Worst u_d over attacks for j=0..4: 0, 235, 226, 188, 486.
  const auto r = maximin_strategy(aqua(), Player::defender, Criterion::cost_utility);
  CHECK(r.chosen == std::vector<int>{4});
  CHECK(r.values[0] == doctest::Approx(486));
}

TEST_CASE("defender plays j=1 against the most likely attack i=5") {
  const auto r = play_against_most_likely(aqua(), Player::defender, 5, Criterion::cost_utility);
  CHECK(r.chosen == std::vector<int>{1});
  CHECK(r.values[0] == doctest::Approx(685));
  const auto& last = r.trace.back();
  REQUIRE_FALSE(last.cells.empty());
  CHECK(last.cells[0].matrix == MatrixKind::defender_utility);
  CHECK(last.cells[0].attack == 5);
  CHECK(last.cells[0].defense == 1);
}

TEST_CASE("most damaging attacker") {
  const auto plural =
      most_damaging_opponent(aqua(), Player::defender, DamageRule::plurality, Criterion::cost_utility);
  CHECK(plural.chosen == std::vector<int>{1});
  const auto witness = most_damaging_opponent(aqua(), Player::defender, DamageRule::minimax_witness,
                                              Criterion::cost_utility);
  CHECK(witness.chosen == std::vector<int>{1});
}

TEST_CASE("robust maximin over {1,5} is j=4 at 486") {
  const auto r = robust_selection(aqua(), Player::defender, {1, 5}, MaximinOverSet{},
                                  Criterion::cost_utility);
  CHECK(r.chosen == std::vector<int>{4});
  CHECK(r.values[0] == doctest::Approx(486));
}

TEST_CASE("lexicographic rule picks j=1 for floors up to 235") {
  for (double floor : {0.0, 100.0, 200.0, 235.0}) {
    CAPTURE(floor);
    const auto r = robust_selection(aqua(), Player::defender, {1, 5}, Lexicographic{5, 1, floor},
                                    Criterion::cost_utility);
    CHECK(r.feasible);
    CHECK(r.chosen == std::vector<int>{1});
  }
  // Above 235 only j=4 clears the floor against i=1.
  const auto high = robust_selection(aqua(), Player::defender, {1, 5}, Lexicographic{5, 1, 300},
                                     Criterion::cost_utility);
  CHECK(high.chosen == std::vector<int>{4});
  const auto none = robust_selection(aqua(), Player::defender, {1, 5}, Lexicographic{5, 1, 1000},
                                     Criterion::cost_utility);
  CHECK_FALSE(none.feasible);
}

TEST_CASE("lexicographic requires likely and damaging inside the set") {
  CHECK_THROWS_AS(robust_selection(aqua(), Player::defender, {5}, Lexicographic{5, 1, 0},
                                   Criterion::cost_utility),
                  AnalysisError);
}

TEST_CASE("dominance on AQUA") {
  const auto strict = dominated_strategies(aqua(), Player::attacker, 0.0);
  CHECK(std::count(strict.begin(), strict.end(), Dominance{3, 1, DominanceKind::strict}) == 1);
  CHECK(std::count(strict.begin(), strict.end(), Dominance{3, 2, DominanceKind::strict}) == 1);
  for (const auto& d : strict) CHECK(d.dominated != 4);

  const auto eps = dominated_strategies(aqua(), Player::attacker, 5.0);
  CHECK(std::count(eps.begin(), eps.end(), Dominance{4, 5, DominanceKind::epsilon}) == 1);

  const auto defender = dominated_strategies(aqua(), Player::defender, 0.0);
  for (int by : {1, 2, 3}) {
    CHECK(std::count(defender.begin(), defender.end(), Dominance{0, by, DominanceKind::strict}) == 1);
  }
}

TEST_CASE("weak dominance is separated from strict") {
  const auto b = from_payoffs({{1, 2}, {1, 3}}, {{0, 0}, {0, 0}});
  const auto d = dominated_strategies(b, Player::attacker, 0.0);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Dominance{1, 2, DominanceKind::weak});
}

TEST_CASE("ties are returned as sets and single choices break to the lowest id") {
  const auto b = from_payoffs({{5, 1}, {5, 1}}, {{2, 2}, {2, 2}});
  const auto eq = find_pure_equilibria(b, Criterion::cost_utility);
  CHECK(eq.size() == 4);
  const auto r = maximin_strategy(b, Player::attacker, Criterion::cost_utility);
  CHECK(r.chosen == std::vector<int>{1});
  bool noted = false;
  for (const auto& step : r.trace) noted = noted || step.text.find("tie") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("penetration criterion: defender minimizes P_T") {
  const auto r = maximin_strategy(aqua(), Player::defender, Criterion::penetration_probability);
  REQUIRE(r.chosen.size() == 1);
  // worst case over attacks is 1 at j=0 and shrinks with mitigation; j=4 has max 0.25
  CHECK(r.chosen[0] == 4);
}

TEST_CASE("unknown ids raise AnalysisError") {
  CHECK_THROWS_AS(play_against_most_likely(aqua(), Player::defender, 42, Criterion::cost_utility),
                  AnalysisError);
}

TEST_CASE("string conversions") {
  CHECK(criterion_from_string("penetration") == Criterion::penetration_probability);
  CHECK(criterion_from_string("cost_utility") == Criterion::cost_utility);
  CHECK(player_from_string("red") == Player::attacker);
  CHECK(player_from_string("blue") == Player::defender);
  CHECK(opponent_of(Player::attacker) == Player::defender);
  CHECK_THROWS_AS(player_from_string("green"), AnalysisError);
}
