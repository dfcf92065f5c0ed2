#pragma once

#include <cstdint>
#include <vector>

#include "coa/game_analysis.hpp"
#include "coa/scenario.hpp"

namespace coa {

// Counter-based generator: every draw is a pure function of its key, so any
// trial can be evaluated on any thread in any order.
struct DrawKey {
  std::uint64_t seed = 0;
  std::int64_t attack = 0;
  std::int64_t defense = 0;
  std::uint64_t trial = 0;
  std::uint64_t draw = 0;
};

std::uint64_t counter_hash(const DrawKey& key);
double counter_uniform(const DrawKey& key);  // in [0, 1)

enum class FactorMode {
  per_layer,  // pre-attack fixed factors plus one factor per layer
  collapsed,  // a single factor equal to P_T
};

struct SimulationOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  FactorMode mode = FactorMode::per_layer;
};

struct SimulationEstimate {
  StrategyPair pair;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal approximation
  std::uint64_t seed = 0;

  bool operator==(const SimulationEstimate&) const = default;
};

struct UtilityEstimate {
  SimulationEstimate penetration;
  double attacker_mean = 0.0;
  double defender_mean = 0.0;
  double attacker_ci_halfwidth = 0.0;
  double defender_ci_halfwidth = 0.0;
};

// Independent success factors sampled for one strategy pair.
std::vector<Probability> penetration_factors(const Scenario& scenario, int attack_id,
                                             int defense_id, FactorMode mode);

SimulationEstimate simulate_pair(const Scenario& scenario, int attack_id, int defense_id,
                                 const SimulationOptions& options);

UtilityEstimate simulate_expected_utilities(const Scenario& scenario, int attack_id,
                                            int defense_id, const SimulationOptions& options);

}  // namespace coa
