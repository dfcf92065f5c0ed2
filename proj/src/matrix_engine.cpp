#include "coa/matrix_engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace coa {

namespace {

// Differential terms of one attack, condensed over layers, one entry per
// mitigation in scenario order.
struct CondensedEffects {
  std::vector<Money> cost;
  std::vector<Probability> prob;
};

// Layer-by-mitigation grids (the per-attack C^i_{lm} / p^i_{lm} view) condensed
// by summing costs and multiplying probabilities down each mitigation column.
CondensedEffects condense(const Scenario& scenario, const AttackStrategy& attack) {
  const std::size_t layer_count = scenario.layers.size();
  const std::size_t mitigation_count = scenario.mitigations.size();
  Matrix layer_cost(layer_count, mitigation_count, 0.0);
  Matrix layer_prob(layer_count, mitigation_count, 1.0);

  for (const auto& effect : attack.differential_effects) {
    const auto m_it = std::find_if(
        scenario.mitigations.begin(), scenario.mitigations.end(),
        [&](const Mitigation& m) { return m.id == effect.mitigation_id; });
    const auto k = static_cast<std::size_t>(m_it - scenario.mitigations.begin());
    const auto l = static_cast<std::size_t>(effect.layer - 1);
    layer_cost(l, k) = effect.extra_cost;
    layer_prob(l, k) = effect.success_prob;
  }

  CondensedEffects out{std::vector<Money>(mitigation_count, 0.0),
                       std::vector<Probability>(mitigation_count, 1.0)};
  for (std::size_t k = 0; k < mitigation_count; ++k) {
    for (std::size_t l = 0; l < layer_count; ++l) {
      out.cost[k] += layer_cost(l, k);
      out.prob[k] *= layer_prob(l, k);
    }
  }
  return out;
}

}  // namespace

std::size_t MatrixBundle::attack_pos(int attack_id) const {
  auto it = std::find(attack_ids.begin(), attack_ids.end(), attack_id);
  if (it == attack_ids.end()) {
    throw std::out_of_range("unknown attack strategy id " + std::to_string(attack_id));
  }
  return static_cast<std::size_t>(it - attack_ids.begin());
}

std::size_t MatrixBundle::defense_pos(int defense_id) const {
  auto it = std::find(defense_ids.begin(), defense_ids.end(), defense_id);
  if (it == defense_ids.end()) {
    throw std::out_of_range("unknown defense strategy id " + std::to_string(defense_id));
  }
  return static_cast<std::size_t>(it - defense_ids.begin());
}

std::string_view matrix_symbol(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::attacker_cost: return "C_a";
    case MatrixKind::defender_cost: return "C_d";
    case MatrixKind::penetration: return "P_T";
    case MatrixKind::attacker_utility: return "u_a";
    case MatrixKind::defender_utility: return "u_d";
  }
  return "?";
}

MatrixKind matrix_kind_from_symbol(std::string_view symbol) {
  for (auto kind : kAllMatrixKinds) {
    if (matrix_symbol(kind) == symbol) return kind;
  }
  throw std::invalid_argument("unknown matrix '" + std::string(symbol) + "'");
}

const Matrix& select(const MatrixBundle& bundle, MatrixKind kind) {
  switch (kind) {
    case MatrixKind::attacker_cost: return bundle.attacker_cost;
    case MatrixKind::defender_cost: return bundle.defender_cost;
    case MatrixKind::penetration: return bundle.penetration;
    case MatrixKind::attacker_utility: return bundle.attacker_utility;
    case MatrixKind::defender_utility: return bundle.defender_utility;
  }
  throw std::logic_error("bad MatrixKind");
}

LayerProbabilityTable::LayerProbabilityTable(std::size_t attacks, std::size_t defenses,
                                             std::size_t layers)
    : attacks_(attacks),
      defenses_(defenses),
      layers_(layers),
      values_(attacks * defenses * layers, 1.0),
      pre_attack_(attacks, 1.0) {}

double& LayerProbabilityTable::at(std::size_t attack, std::size_t defense, std::size_t layer) {
  return values_.at((attack * defenses_ + defense) * layers_ + layer);
}

double LayerProbabilityTable::at(std::size_t attack, std::size_t defense,
                                 std::size_t layer) const {
  return values_.at((attack * defenses_ + defense) * layers_ + layer);
}

DefenderCosts defender_costs(const Scenario& scenario) {
  const auto translation = build_translation_matrix(scenario);
  DefenderCosts out;
  out.defense_ids = translation.defense_ids;
  for (const auto& row : translation.rows) {
    Money total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k]) total += scenario.mitigations[k].cost;
    }
    out.per_strategy.push_back(total);
  }
  out.matrix = Matrix(scenario.attack_strategies.size(), out.per_strategy.size());
  for (std::size_t i = 0; i < out.matrix.rows(); ++i) {
    for (std::size_t j = 0; j < out.matrix.cols(); ++j) out.matrix(i, j) = out.per_strategy[j];
  }
  return out;
}

AttackerCosts attacker_costs(const Scenario& scenario) {
  const auto translation = build_translation_matrix(scenario);
  const std::size_t attacks = scenario.attack_strategies.size();
  const std::size_t defenses = translation.rows.size();
  AttackerCosts out{Matrix(attacks, defenses), Matrix(attacks, defenses),
                    Matrix(attacks, defenses)};

  for (std::size_t i = 0; i < attacks; ++i) {
    const auto& attack = scenario.attack_strategies[i];
    Money fixed = 0.0;
    for (const auto& term : attack.fixed_terms) fixed += term.cost;
    const auto condensed = condense(scenario, attack);
    for (std::size_t j = 0; j < defenses; ++j) {
      Money differential = 0.0;
      for (std::size_t k = 0; k < condensed.cost.size(); ++k) {
        if (translation.rows[j][k]) differential += condensed.cost[k];
      }
      out.fixed(i, j) = fixed;
      out.differential(i, j) = differential;
      out.total(i, j) = fixed + differential;
    }
  }
  return out;
}

PenetrationProbabilities penetration_probabilities(const Scenario& scenario) {
  const auto translation = build_translation_matrix(scenario);
  const std::size_t attacks = scenario.attack_strategies.size();
  const std::size_t defenses = translation.rows.size();
  const std::size_t layers = scenario.layers.size();
  PenetrationProbabilities out{LayerProbabilityTable(attacks, defenses, layers),
                               Matrix(attacks, defenses), Matrix(attacks, defenses),
                               Matrix(attacks, defenses)};

  for (std::size_t i = 0; i < attacks; ++i) {
    const auto& attack = scenario.attack_strategies[i];

    Probability fixed = 1.0;
    std::vector<Probability> fixed_by_layer(layers, 1.0);
    for (const auto& term : attack.fixed_terms) {
      fixed *= term.success_prob;
      if (term.layer) {
        fixed_by_layer[static_cast<std::size_t>(*term.layer - 1)] *= term.success_prob;
      } else {
        out.layers.pre_attack()[i] *= term.success_prob;
      }
    }

    const auto condensed = condense(scenario, attack);
    for (std::size_t j = 0; j < defenses; ++j) {
      Probability differential = 1.0;
      for (std::size_t k = 0; k < condensed.prob.size(); ++k) {
        if (translation.rows[j][k]) differential *= condensed.prob[k];
      }
      out.fixed(i, j) = fixed;
      out.differential(i, j) = differential;
      out.total(i, j) = fixed * differential;

      const auto& active = translation.rows[j];
      for (std::size_t l = 0; l < layers; ++l) out.layers.at(i, j, l) = fixed_by_layer[l];
      for (const auto& effect : attack.differential_effects) {
        const auto m_it = std::find(translation.mitigation_ids.begin(),
                                    translation.mitigation_ids.end(), effect.mitigation_id);
        const auto k = static_cast<std::size_t>(m_it - translation.mitigation_ids.begin());
        if (active[k]) {
          out.layers.at(i, j, static_cast<std::size_t>(effect.layer - 1)) *= effect.success_prob;
        }
      }
    }
  }
  return out;
}

MatrixBundle compute_bundle(const Scenario& scenario) {
  require_valid(scenario);
  const auto defender = defender_costs(scenario);
  auto attacker = attacker_costs(scenario);
  auto probabilities = penetration_probabilities(scenario);

  MatrixBundle bundle;
  for (const auto& a : scenario.attack_strategies) bundle.attack_ids.push_back(a.id);
  bundle.defense_ids = defender.defense_ids;
  bundle.benefit = scenario.benefit;
  bundle.attacker_cost = std::move(attacker.total);
  bundle.defender_cost = defender.matrix;
  bundle.penetration = std::move(probabilities.total);

  const std::size_t rows = bundle.attack_ids.size();
  const std::size_t cols = bundle.defense_ids.size();
  bundle.attacker_utility = Matrix(rows, cols);
  bundle.defender_utility = Matrix(rows, cols);
  const Money b = scenario.benefit;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const Probability p = bundle.penetration(i, j);
      bundle.attacker_utility(i, j) = b * p - bundle.attacker_cost(i, j);
      bundle.defender_utility(i, j) = b * (1.0 - p) - bundle.defender_cost(i, j);
    }
  }
  return bundle;
}

}  // namespace coa
