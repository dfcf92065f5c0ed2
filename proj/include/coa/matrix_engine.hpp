#pragma once

#include <string_view>
#include <vector>

#include "coa/matrix.hpp"
#include "coa/scenario.hpp"

namespace coa {

// The five derived matrices, rows indexed by attack position, columns by defense
// position. Positions map to strategy ids through attack_ids / defense_ids.
struct MatrixBundle {
  std::vector<int> attack_ids;
  std::vector<int> defense_ids;
  Matrix attacker_cost;     // C_a
  Matrix defender_cost;     // C_d
  Matrix penetration;       // P_T
  Matrix attacker_utility;  // u_a = b P_T - C_a
  Matrix defender_utility;  // u_d = b (1 - P_T) - C_d
  Money benefit = 0.0;

  bool operator==(const MatrixBundle&) const = default;

  std::size_t attack_count() const { return attack_ids.size(); }
  std::size_t defense_count() const { return defense_ids.size(); }

  // Position lookups; throw std::out_of_range for unknown ids.
  std::size_t attack_pos(int attack_id) const;
  std::size_t defense_pos(int defense_id) const;
};

enum class MatrixKind { attacker_cost, defender_cost, penetration, attacker_utility, defender_utility };

inline constexpr MatrixKind kAllMatrixKinds[] = {
    MatrixKind::attacker_cost, MatrixKind::defender_cost, MatrixKind::penetration,
    MatrixKind::attacker_utility, MatrixKind::defender_utility};

// Short names used in files and the API: C_a, C_d, P_T, u_a, u_d.
std::string_view matrix_symbol(MatrixKind kind);
MatrixKind matrix_kind_from_symbol(std::string_view symbol);
const Matrix& select(const MatrixBundle& bundle, MatrixKind kind);

struct DefenderCosts {
  std::vector<int> defense_ids;
  std::vector<Money> per_strategy;  // C_d,j
  Matrix matrix;                    // broadcast over attacks
};

struct AttackerCosts {
  Matrix fixed;         // C^0
  Matrix differential;  // C^D
  Matrix total;         // C_a
};

// Per (attack, defense, layer) penetration factor plus the pre-attack factor
// (fixed terms without a layer). Product of both equals P_T.
class LayerProbabilityTable {
 public:
  LayerProbabilityTable() = default;
  LayerProbabilityTable(std::size_t attacks, std::size_t defenses, std::size_t layers);

  std::size_t layer_count() const { return layers_; }
  double& at(std::size_t attack, std::size_t defense, std::size_t layer);
  double at(std::size_t attack, std::size_t defense, std::size_t layer) const;

  std::vector<double>& pre_attack() { return pre_attack_; }
  const std::vector<double>& pre_attack() const { return pre_attack_; }

 private:
  std::size_t attacks_ = 0, defenses_ = 0, layers_ = 0;
  std::vector<double> values_;
  std::vector<double> pre_attack_;  // one per attack
};

struct PenetrationProbabilities {
  LayerProbabilityTable layers;
  Matrix fixed;         // p^0
  Matrix differential;  // p^D
  Matrix total;         // P_T
};

DefenderCosts defender_costs(const Scenario& scenario);
AttackerCosts attacker_costs(const Scenario& scenario);
PenetrationProbabilities penetration_probabilities(const Scenario& scenario);
MatrixBundle compute_bundle(const Scenario& scenario);

}  // namespace coa
