#include "coa/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "coa/matrix_engine.hpp"

namespace coa {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t count_successes(const std::vector<Probability>& factors, const DrawKey& base,
                              std::uint64_t first, std::uint64_t last) {
  std::uint64_t successes = 0;
  DrawKey key = base;
  for (std::uint64_t t = first; t < last; ++t) {
    key.trial = t;
    bool passed = true;
    for (std::size_t f = 0; f < factors.size() && passed; ++f) {
      key.draw = f;
      passed = counter_uniform(key) < factors[f];
    }
    successes += passed ? 1 : 0;
  }
  return successes;
}

}  // namespace

std::uint64_t counter_hash(const DrawKey& key) {
  std::uint64_t h = splitmix64(key.seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.attack));
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.defense));
  h = splitmix64(h ^ key.trial);
  return splitmix64(h ^ key.draw);
}

double counter_uniform(const DrawKey& key) {
  return static_cast<double>(counter_hash(key) >> 11) * 0x1.0p-53;
}

std::vector<Probability> penetration_factors(const Scenario& scenario, int attack_id,
                                             int defense_id, FactorMode mode) {
  require_valid(scenario);
  const auto* attack = scenario.find_attack(attack_id);
  if (attack == nullptr) {
    throw std::out_of_range("unknown attack strategy id " + std::to_string(attack_id));
  }
  if (scenario.find_defense(defense_id) == nullptr) {
    throw std::out_of_range("unknown defense strategy id " + std::to_string(defense_id));
  }
  const auto i = static_cast<std::size_t>(attack - scenario.attack_strategies.data());
  const auto j = static_cast<std::size_t>(scenario.find_defense(defense_id) -
                                          scenario.defense_strategies.data());
  const auto probabilities = penetration_probabilities(scenario);

  if (mode == FactorMode::collapsed) return {probabilities.total(i, j)};

  std::vector<Probability> factors;
  for (const auto& term : attack->fixed_terms) {
    if (!term.layer) factors.push_back(term.success_prob);
  }
  for (std::size_t l = 0; l < probabilities.layers.layer_count(); ++l) {
    factors.push_back(probabilities.layers.at(i, j, l));
  }
  return factors;
}

SimulationEstimate simulate_pair(const Scenario& scenario, int attack_id, int defense_id,
                                 const SimulationOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto factors = penetration_factors(scenario, attack_id, defense_id, options.mode);
  const DrawKey base{options.seed, attack_id, defense_id, 0, 0};

  const unsigned threads = std::clamp(options.threads, 1u, 64u);
  std::vector<std::uint64_t> partial(threads, 0);
  if (threads == 1) {
    partial[0] = count_successes(factors, base, 0, options.trials);
  } else {
    std::vector<std::thread> workers;
    const std::uint64_t chunk = (options.trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t first = std::min(options.trials, chunk * t);
      const std::uint64_t last = std::min(options.trials, first + chunk);
      workers.emplace_back([&, t, first, last] {
        partial[t] = count_successes(factors, base, first, last);
      });
    }
    for (auto& w : workers) w.join();
  }

  SimulationEstimate out;
  out.pair = {attack_id, defense_id};
  out.trials = options.trials;
  for (auto s : partial) out.successes += s;
  out.p_hat = static_cast<double>(out.successes) / static_cast<double>(out.trials);
  out.ci_halfwidth =
      kZ95 * std::sqrt(out.p_hat * (1.0 - out.p_hat) / static_cast<double>(out.trials));
  out.seed = options.seed;
  return out;
}

UtilityEstimate simulate_expected_utilities(const Scenario& scenario, int attack_id,
                                            int defense_id, const SimulationOptions& options) {
  UtilityEstimate out;
  out.penetration = simulate_pair(scenario, attack_id, defense_id, options);
  const auto bundle = compute_bundle(scenario);
  const auto i = bundle.attack_pos(attack_id);
  const auto j = bundle.defense_pos(defense_id);
  const double b = scenario.benefit;
  const double p = out.penetration.p_hat;
  // Per-trial utilities are b*success - C_a and b*(1 - success) - C_d.
  out.attacker_mean = b * p - bundle.attacker_cost(i, j);
  out.defender_mean = b * (1.0 - p) - bundle.defender_cost(i, j);
  out.attacker_ci_halfwidth = b * out.penetration.ci_halfwidth;
  out.defender_ci_halfwidth = b * out.penetration.ci_halfwidth;
  return out;
}

}  // namespace coa
