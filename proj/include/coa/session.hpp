#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coa/analysis.hpp"
#include "coa/matrix_engine.hpp"
#include "coa/scenario.hpp"
#include "coa/scenario_io.hpp"

namespace coa {

enum class Cell { red, blue, white };
std::string_view to_string(Cell cell);
Cell cell_from_string(std::string_view text);

// Amendment operations. Effect targets are (attack, mitigation, layer); when the
// layer is omitted the attack must have exactly one effect for that mitigation.
struct SetEffectProbability {
  int attack = 0;
  int mitigation = 0;
  std::optional<int> layer;
  Probability value = 1.0;
};
struct SetEffectCost {
  int attack = 0;
  int mitigation = 0;
  std::optional<int> layer;
  Money value = 0.0;
};
struct SetFixedTerm {
  int attack = 0;
  std::size_t term = 0;  // index into fixed_terms
  std::optional<Money> cost;
  std::optional<Probability> success_prob;
};
struct SetMitigationCost {
  int mitigation = 0;
  Money value = 0.0;
};
struct SetBenefit {
  Money value = 0.0;
};
// Sunk penetration: every factor of `attack` at `layer` becomes 1 and its costs
// at that layer become 0. Pre-attack terms are untouched.
struct MarkLayerCompromised {
  int attack = 0;
  int layer = 0;
};
struct AddMitigation {
  Mitigation mitigation;
};
// Also drops the mitigation from every strategy and every effect that names it.
struct RemoveMitigation {
  int mitigation = 0;
};
struct AddDefenseStrategy {
  DefenseStrategy strategy;
};
struct RemoveDefenseStrategy {
  int defense = 0;
};
struct AddAttackStrategy {
  AttackStrategy strategy;
};
struct RemoveAttackStrategy {
  int attack = 0;
};
struct AddStrategyMitigation {
  int defense = 0;
  int mitigation = 0;
};
struct RemoveStrategyMitigation {
  int defense = 0;
  int mitigation = 0;
};

using AmendmentOp =
    std::variant<SetEffectProbability, SetEffectCost, SetFixedTerm, SetMitigationCost, SetBenefit,
                 MarkLayerCompromised, AddMitigation, RemoveMitigation, AddDefenseStrategy,
                 RemoveDefenseStrategy, AddAttackStrategy, RemoveAttackStrategy,
                 AddStrategyMitigation, RemoveStrategyMitigation>;

struct Amendment {
  AmendmentOp op;
  Cell author = Cell::white;
};

std::string_view amendment_kind(const AmendmentOp& op);

// Target lookup failures (unknown attack, ambiguous effect, ...).
class AmendmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Applies amendments in order and validates the result; throws AmendmentError
// or InvalidScenario.
Scenario apply_amendments(Scenario scenario, std::span<const Amendment> amendments);

struct Decisions {
  std::optional<int> attack;
  std::optional<int> defense;
  std::string rationale;
};

struct SessionRound {
  std::size_t index = 0;
  std::vector<Amendment> amendments;
  std::optional<Decisions> decisions;
  Scenario scenario;  // amended scenario
  MatrixBundle bundle;
  std::string committed_at;
};

struct Session {
  std::string id;
  std::string created_at;
  std::string updated_at;
  std::vector<SessionRound> rounds;  // round 0 carries no amendments

  const Scenario& scenario() const { return rounds.back().scenario; }
};

class SessionNotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class RoundNotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Optimistic concurrency failure: the caller's base round is stale.
class RoundConflict : public std::runtime_error {
 public:
  RoundConflict(std::size_t expected, std::size_t current);
  std::size_t current_round() const { return current_; }

 private:
  std::size_t current_;
};

// Thread-safe registry of sessions. With a data directory every session is
// persisted as an append-only JSON-lines log (<id>.jsonl) and reloaded on start.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

  Session create(const Scenario& scenario);

  // expected_base_round, when given, must equal the latest round index.
  SessionRound append_round(const std::string& id, std::vector<Amendment> amendments,
                            std::optional<Decisions> decisions,
                            std::optional<std::size_t> expected_base_round = std::nullopt);

  Session get(const std::string& id) const;
  SessionRound round(const std::string& id, std::size_t index) const;
  std::vector<std::string> ids() const;

  SelectionResult query_analysis(const std::string& id, std::size_t round_index,
                                 const AnalysisRequest& request) const;

 private:
  struct Entry {
    mutable std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void load_existing();
  void persist_line(const std::string& id, const Json& line) const;
  std::string new_id();

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_ = 0;
};

// JSON codecs for the API and the export/replay format.
Json amendment_to_json(const Amendment& amendment);
Amendment amendment_from_json(const Json& node, double labor_rate);
Json decisions_to_json(const Decisions& decisions);
Decisions decisions_from_json(const Json& node);
Json round_to_json(const SessionRound& round);
Json session_summary_json(const Session& session);
// Full replayable log: base scenario plus every round's amendments, decisions
// and stored bundle.
Json export_session(const Session& session);

struct ReplayReport {
  std::size_t rounds = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Recomputes every round from the base scenario and the amendment log and
// compares against the stored bundles.
ReplayReport replay_export(const Json& exported);

std::string utc_timestamp();

}  // namespace coa
