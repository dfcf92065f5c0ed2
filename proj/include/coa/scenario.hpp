#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace coa {

// All money values are k$. Hour-denominated inputs are converted at load time.
using Money = double;
using Probability = double;

struct LayerSpec {
  int index = 0;  // 1-based
  std::string description;

  bool operator==(const LayerSpec&) const = default;
};

struct Mitigation {
  int id = 0;
  std::string name;
  Money cost = 0.0;

  bool operator==(const Mitigation&) const = default;
};

struct DefenseStrategy {
  int id = 0;
  std::string name;
  std::set<int> mitigation_ids;  // empty is "No Action"

  bool operator==(const DefenseStrategy&) const = default;
};

// Attacker cost/probability that does not depend on the defense. A term without
// a layer is pre-attack preparation; its probability still multiplies into P_T.
struct FixedAttackTerm {
  std::optional<int> layer;
  Money cost = 0.0;
  Probability success_prob = 1.0;
  std::string note;

  bool operator==(const FixedAttackTerm&) const = default;
};

// Attacker cost/probability that applies only while `mitigation_id` is active.
struct DifferentialEffect {
  int mitigation_id = 0;
  int layer = 0;
  Money extra_cost = 0.0;
  Probability success_prob = 1.0;
  std::string note;

  bool operator==(const DifferentialEffect&) const = default;
};

struct AttackStrategy {
  int id = 0;
  std::string name;
  std::vector<FixedAttackTerm> fixed_terms;
  std::vector<DifferentialEffect> differential_effects;

  bool operator==(const AttackStrategy&) const = default;
};

struct Scenario {
  std::string name;
  Money benefit = 0.0;
  Money labor_rate = 1.0;  // k$ per hour
  std::vector<LayerSpec> layers;
  std::vector<Mitigation> mitigations;
  std::vector<DefenseStrategy> defense_strategies;
  std::vector<AttackStrategy> attack_strategies;

  bool operator==(const Scenario&) const = default;

  const Mitigation* find_mitigation(int id) const;
  const DefenseStrategy* find_defense(int id) const;
  const AttackStrategy* find_attack(int id) const;
  bool has_layer(int index) const;
};

struct Defect {
  std::string path;
  std::string message;

  bool operator==(const Defect&) const = default;
};

struct ValidationReport {
  std::vector<Defect> defects;

  bool ok() const { return defects.empty(); }
};

// Thrown by operations whose precondition is a valid scenario.
class InvalidScenario : public std::runtime_error {
 public:
  explicit InvalidScenario(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Reports every defect, ordered by location in the scenario.
ValidationReport validate(const Scenario& scenario);

// Throws InvalidScenario when validate() reports anything.
void require_valid(const Scenario& scenario);

// Incidence of mitigations (columns, in scenario order) in defense strategies
// (rows, in scenario order).
struct TranslationMatrix {
  std::vector<int> defense_ids;
  std::vector<int> mitigation_ids;
  std::vector<std::vector<std::uint8_t>> rows;

  std::size_t row_sum(std::size_t row) const;
};

TranslationMatrix build_translation_matrix(const Scenario& scenario);

}  // namespace coa
