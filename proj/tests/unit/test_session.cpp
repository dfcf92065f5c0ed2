#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "coa/session.hpp"
#include "test_support.hpp"

using namespace coa;
namespace fs = std::filesystem;

namespace {

const Scenario& aqua() {
  static const Scenario s = testing::load_aqua();
  return s;
}

Amendment amend(AmendmentOp op, Cell who = Cell::white) { return {std::move(op), who}; }

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("round 0 reproduces the AQUA bundle") {
  SessionStore store;
  const auto session = store.create(aqua());
  REQUIRE(session.rounds.size() == 1);
  CHECK(session.rounds[0].amendments.empty());
  CHECK(session.rounds[0].bundle == compute_bundle(aqua()));
  CHECK(store.get(session.id).rounds.size() == 1);
}

TEST_CASE("creations get distinct ids and invalid scenarios are refused") {
  SessionStore store;
  CHECK(store.create(aqua()).id != store.create(aqua()).id);
  auto bad = aqua();
  bad.benefit = -1;
  CHECK_THROWS_AS(store.create(bad), InvalidScenario);
}

TEST_CASE("editing the USB-media effect for attack 3 gives P_T[3][1] = 0.35") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  const auto r = store.append_round(id, {amend(SetEffectProbability{3, 12, std::nullopt, 0.5}, Cell::red)},
                                    std::nullopt);
  CHECK(r.index == 1);
  CHECK(r.bundle.penetration(r.bundle.attack_pos(3), r.bundle.defense_pos(1)) ==
        doctest::Approx(0.35).epsilon(1e-12));
  // prior round untouched
  CHECK(store.round(id, 0).bundle.penetration(2, 1) == 0.0);
}

TEST_CASE("an empty round keeps the bundle") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  const auto r = store.append_round(id, {}, Decisions{5, 1, "hold"});
  CHECK(r.bundle == store.round(id, 0).bundle);
  REQUIRE(r.decisions.has_value());
  CHECK(r.decisions->attack == 5);
}

TEST_CASE("compromising layer 1 for attack 1 keeps P_T and drops the layer costs") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  const auto r = store.append_round(id, {amend(MarkLayerCompromised{1, 1})}, std::nullopt);
  const auto& before = store.round(id, 0).bundle;
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(r.bundle.penetration(0, j) == before.penetration(0, j));
  }
  // layer-1 fixed time (24 hr) and, for j >= 1, the extra WiFi cracking time (24 hr)
  CHECK(r.bundle.attacker_cost(0, 0) == 220);
  for (std::size_t j = 1; j < 5; ++j) CHECK(r.bundle.attacker_cost(0, j) == 224);
  // other attacks unchanged
  CHECK(r.bundle.attacker_cost(1, 4) == before.attacker_cost(1, 4));
}

TEST_CASE("compromising a layer sets its factors to one") {
  auto s = apply_amendments(aqua(), std::vector<Amendment>{amend(MarkLayerCompromised{2, 4})});
  const auto b = compute_bundle(s);
  // attack 2 keeps only the layer-2 and layer-3 factors
  CHECK(b.penetration(1, 4) == doctest::Approx(0.5 * 0.125));
  CHECK(b.attacker_cost(1, 4) == 65);
}

TEST_CASE("amendment validation failure leaves the session unchanged") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  CHECK_THROWS_AS(store.append_round(id, {amend(SetEffectProbability{3, 12, std::nullopt, 1.5})},
                                     std::nullopt),
                  InvalidScenario);
  CHECK_THROWS_AS(store.append_round(id, {amend(SetEffectProbability{3, 99, std::nullopt, 0.5})},
                                     std::nullopt),
                  AmendmentError);
  // attack 1 has three mitigation-8 effects, so the layer must be named
  CHECK_THROWS_AS(store.append_round(id, {amend(SetEffectProbability{1, 8, std::nullopt, 0.5})},
                                     std::nullopt),
                  AmendmentError);
  CHECK(store.get(id).rounds.size() == 1);
}

TEST_CASE("a named missing layer creates the effect") {
  const auto s = apply_amendments(
      aqua(), std::vector<Amendment>{amend(SetEffectProbability{5, 15, 4, 0.5})});
  const auto b = compute_bundle(s);
  CHECK(b.penetration(4, 4) == doctest::Approx(0.125));
  CHECK(b.penetration(4, 3) == doctest::Approx(0.25));
}

TEST_CASE("structural amendments") {
  std::vector<Amendment> ops = {
      amend(AddMitigation{{16, "Air-gap audit", 12}}, Cell::blue),
      amend(AddStrategyMitigation{4, 16}, Cell::blue),
      amend(RemoveMitigation{8}, Cell::blue),
      amend(AddDefenseStrategy{{5, "Audit only", {16}}}, Cell::blue),
      amend(RemoveAttackStrategy{3}, Cell::red),
      amend(SetMitigationCost{1, 20}),
      amend(SetBenefit{500}),
      amend(SetFixedTerm{4, 0, std::nullopt, 0.75}),
  };
  const auto s = apply_amendments(aqua(), ops);
  CHECK(s.find_mitigation(8) == nullptr);
  CHECK(s.find_defense(4)->mitigation_ids.count(8) == 0);
  CHECK(s.find_defense(4)->mitigation_ids.count(16) == 1);
  CHECK(s.find_attack(3) == nullptr);
  for (const auto& e : s.find_attack(1)->differential_effects) CHECK(e.mitigation_id != 8);
  const auto b = compute_bundle(s);
  CHECK(b.defense_ids.back() == 5);
  CHECK(b.defender_cost(0, b.defense_pos(4)) == 264 - 40 + 12 + 10);
  CHECK(b.benefit == 500);
  CHECK(b.penetration(b.attack_pos(4), 0) == 0.75);

  CHECK_THROWS_AS(apply_amendments(aqua(), std::vector<Amendment>{amend(RemoveDefenseStrategy{7})}),
                  AmendmentError);
  CHECK_THROWS_AS(apply_amendments(aqua(), std::vector<Amendment>{amend(SetFixedTerm{2, 5, 1.0, std::nullopt})}),
                  AmendmentError);
}

TEST_CASE("stale base round is rejected with the current index") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  store.append_round(id, {}, std::nullopt, 0);
  try {
    store.append_round(id, {}, std::nullopt, 0);
    FAIL("expected RoundConflict");
  } catch (const RoundConflict& e) {
    CHECK(e.current_round() == 1);
  }
  CHECK(store.append_round(id, {}, std::nullopt, 1).index == 2);
}

TEST_CASE("concurrent writers with the same base: exactly one wins") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  std::atomic<int> wins{0}, conflicts{0};
  std::vector<std::thread> writers;
  for (int t = 0; t < 8; ++t) {
    writers.emplace_back([&] {
      try {
        store.append_round(id, {amend(SetBenefit{900})}, std::nullopt, 0);
        ++wins;
      } catch (const RoundConflict&) {
        ++conflicts;
      }
    });
  }
  for (auto& w : writers) w.join();
  CHECK(wins == 1);
  CHECK(conflicts == 7);
  CHECK(store.get(id).rounds.size() == 2);
}

TEST_CASE("unconditional concurrent appends all land in order") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  std::vector<std::thread> writers;
  for (int t = 0; t < 6; ++t) {
    writers.emplace_back([&, t] { store.append_round(id, {amend(SetBenefit{1000.0 + t})}, std::nullopt); });
  }
  for (auto& w : writers) w.join();
  const auto session = store.get(id);
  REQUIRE(session.rounds.size() == 7);
  for (std::size_t n = 0; n < session.rounds.size(); ++n) CHECK(session.rounds[n].index == n);
}

TEST_CASE("query_analysis matches in-process analysis") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  const auto eq = store.query_analysis(id, 0, {"pure-equilibria", {{"criterion", "penetration"}}});
  REQUIRE(eq.pairs.size() == 1);
  CHECK(eq.pairs[0] == StrategyPair{5, 4});
  const auto ml = store.query_analysis(id, 0, {"most-likely", {{"player", "defender"}, {"opponent", "5"}}});
  CHECK(ml.chosen == std::vector<int>{1});
  CHECK(ml == play_against_most_likely(compute_bundle(aqua()), Player::defender, 5,
                                       Criterion::cost_utility));
  CHECK_THROWS_AS(store.query_analysis(id, 3, {"maximin", {{"player", "attacker"}}}), RoundNotFound);
  CHECK_THROWS_AS(store.query_analysis("nope", 0, {"maximin", {{"player", "attacker"}}}), SessionNotFound);
  CHECK_THROWS_AS(store.query_analysis(id, 0, {"telepathy", {}}), AnalysisError);
  CHECK_THROWS_AS(store.query_analysis(id, 0, {"maximin", {{"player", "attacker"}, {"colour", "x"}}}),
                  AnalysisError);
}

TEST_CASE("sessions persist to disk and reload") {
  const auto dir = fresh_dir("coa_session_persist");
  std::string id;
  {
    SessionStore store(dir);
    id = store.create(aqua()).id;
    store.append_round(id, {amend(SetEffectProbability{3, 12, std::nullopt, 0.5}, Cell::red)},
                       Decisions{3, 1, "insider hired"});
    store.append_round(id, {amend(MarkLayerCompromised{1, 1})}, std::nullopt);
  }
  SessionStore reloaded(dir);
  const auto session = reloaded.get(id);
  REQUIRE(session.rounds.size() == 3);
  CHECK(session.rounds[1].decisions->rationale == "insider hired");
  CHECK(session.rounds[1].amendments[0].author == Cell::red);
  CHECK(session.rounds[2].bundle.attacker_cost(0, 0) == 220);
  CHECK(reloaded.append_round(id, {}, std::nullopt, 2).index == 3);
  fs::remove_all(dir);
}

TEST_CASE("export replays to identical bundles") {
  SessionStore store;
  const auto id = store.create(aqua()).id;
  store.append_round(id, {amend(SetEffectCost{2, 3, 4, 10})}, std::nullopt);
  store.append_round(id, {amend(RemoveMitigation{12}), amend(SetBenefit{750})}, std::nullopt);
  const auto exported = export_session(store.get(id));
  CHECK(exported["format"] == "coa-session-export");
  const auto report = replay_export(Json::parse(exported.dump()));
  CHECK(report.ok());
  CHECK(report.rounds == 3);

  auto tampered = exported;
  tampered["rounds"][2]["bundle"]["P_T"][0][1] = 0.5;
  const auto bad = replay_export(tampered);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("amendment JSON codec round-trips") {
  const std::vector<Amendment> ops = {
      amend(SetEffectProbability{3, 12, std::nullopt, 0.5}, Cell::red),
      amend(SetEffectCost{2, 3, 4, 10}, Cell::red),
      amend(SetFixedTerm{4, 0, 12.0, 0.4}),
      amend(SetMitigationCost{2, 7}, Cell::blue),
      amend(SetBenefit{800}),
      amend(MarkLayerCompromised{1, 2}),
      amend(AddMitigation{{16, "new", 3}}, Cell::blue),
      amend(RemoveMitigation{3}, Cell::blue),
      amend(AddDefenseStrategy{{7, "d7", {1, 2}}}, Cell::blue),
      amend(RemoveDefenseStrategy{0}, Cell::blue),
      amend(AddAttackStrategy{{6, "a6", {{std::nullopt, 5, 0.5, "n"}}, {{1, 1, 2, 0.5, ""}}}}, Cell::red),
      amend(RemoveAttackStrategy{2}, Cell::red),
      amend(AddStrategyMitigation{1, 2}),
      amend(RemoveStrategyMitigation{1, 1}),
  };
  for (const auto& a : ops) {
    CAPTURE(amendment_kind(a.op));
    const auto j = amendment_to_json(a);
    const auto back = amendment_from_json(Json::parse(j.dump()), 1.0);
    CHECK(amendment_to_json(back) == j);
  }
  CHECK_THROWS_AS(amendment_from_json(Json{{"kind", "teleport"}}, 1.0), AmendmentError);
  CHECK_THROWS_AS(amendment_from_json(Json{{"kind", "set_benefit"}}, 1.0), AmendmentError);
  const auto hours = amendment_from_json(
      Json::parse(R"({"kind": "set_effect_cost", "attack": 1, "mitigation": 1, "value": {"amount": 10, "unit": "hr"}})"),
      2.0);
  CHECK(std::get<SetEffectCost>(hours.op).value == 20);
}
