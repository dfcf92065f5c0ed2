#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coa/matrix_engine.hpp"

namespace coa {

// Utilities closer than this are treated as tied in every argmax / argmin.
inline constexpr double kTieTolerance = 1e-9;

// cost_utility: players maximize u_a / u_d.
// penetration_probability: attacker maximizes P_T, defender minimizes P_T.
enum class Criterion { cost_utility, penetration_probability };
enum class Player { attacker, defender };

std::string_view to_string(Criterion criterion);
std::string_view to_string(Player player);
Criterion criterion_from_string(std::string_view text);
Player player_from_string(std::string_view text);

Player opponent_of(Player player);

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StrategyPair {
  int attack = 0;
  int defense = 0;

  auto operator<=>(const StrategyPair&) const = default;
};

// A matrix cell cited by a trace step.
struct CellRef {
  MatrixKind matrix = MatrixKind::attacker_utility;
  int attack = 0;
  int defense = 0;
  double value = 0.0;

  bool operator==(const CellRef&) const = default;
};

struct TraceStep {
  std::string text;
  std::vector<CellRef> cells;

  bool operator==(const TraceStep&) const = default;
};

struct SelectionResult {
  std::string method;
  std::optional<Player> player;
  std::vector<int> chosen;            // strategy ids of `player` (or of the opponent for most_damaging)
  std::vector<StrategyPair> pairs;    // for pair-valued methods
  std::vector<double> values;         // supporting numbers, one per chosen entry where applicable
  bool feasible = true;
  std::vector<TraceStep> trace;

  bool operator==(const SelectionResult&) const = default;
};

struct BestResponses {
  std::map<int, std::vector<int>> attacker;  // defense id -> best attack ids
  std::map<int, std::vector<int>> defender;  // attack id -> best defense ids
};

BestResponses best_response_sets(const MatrixBundle& bundle, Criterion criterion);

std::vector<StrategyPair> find_pure_equilibria(const MatrixBundle& bundle, Criterion criterion);

enum class DominanceKind { strict, weak, epsilon };
std::string_view to_string(DominanceKind kind);

struct Dominance {
  int dominated = 0;
  int dominating = 0;
  DominanceKind kind = DominanceKind::strict;

  bool operator==(const Dominance&) const = default;
};

// Compares the player's own utility vectors pairwise. Each ordered pair is
// reported at most once, with the strongest kind that holds.
std::vector<Dominance> dominated_strategies(const MatrixBundle& bundle, Player player,
                                            Money epsilon,
                                            Criterion criterion = Criterion::cost_utility);

SelectionResult maximin_strategy(const MatrixBundle& bundle, Player player, Criterion criterion);

SelectionResult play_against_most_likely(const MatrixBundle& bundle, Player player,
                                         int likely_opponent,
                                         Criterion criterion = Criterion::cost_utility);

enum class DamageRule { minimax_witness, plurality };

// Returns the opponent strategy most damaging to `player`; `chosen` holds an
// opponent id.
SelectionResult most_damaging_opponent(const MatrixBundle& bundle, Player player, DamageRule rule,
                                       Criterion criterion = Criterion::cost_utility);

struct MaximinOverSet {};
struct Lexicographic {
  int likely = 0;
  int damaging = 0;
  double floor = 0.0;
};
using RobustRule = std::variant<MaximinOverSet, Lexicographic>;

SelectionResult robust_selection(const MatrixBundle& bundle, Player player,
                                 const std::set<int>& opponent_set, const RobustRule& rule,
                                 Criterion criterion = Criterion::cost_utility);

// Pair-valued methods wrapped as SelectionResults for uniform reporting.
SelectionResult equilibria_result(const MatrixBundle& bundle, Criterion criterion);
SelectionResult best_responses_result(const MatrixBundle& bundle, Criterion criterion);
SelectionResult dominance_result(const MatrixBundle& bundle, Player player, Money epsilon,
                                 Criterion criterion = Criterion::cost_utility);

}  // namespace coa
