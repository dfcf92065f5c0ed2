#include "coa/game_analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

namespace coa {

namespace {

std::string number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string label(Player player, int id) {
  return (player == Player::attacker ? "i=" : "j=") + std::to_string(id);
}

// One player's view of the bundle: `score` is what the player maximizes, `cite`
// is the underlying matrix cell (P_T stays un-negated for the defender).
class PayoffView {
 public:
  PayoffView(const MatrixBundle& bundle, Player player, Criterion criterion)
      : bundle_(bundle), player_(player), criterion_(criterion) {}

  Player player() const { return player_; }
  std::size_t own_count() const {
    return player_ == Player::attacker ? bundle_.attack_count() : bundle_.defense_count();
  }
  std::size_t opp_count() const {
    return player_ == Player::attacker ? bundle_.defense_count() : bundle_.attack_count();
  }
  int own_id(std::size_t pos) const {
    return player_ == Player::attacker ? bundle_.attack_ids[pos] : bundle_.defense_ids[pos];
  }
  int opp_id(std::size_t pos) const {
    return player_ == Player::attacker ? bundle_.defense_ids[pos] : bundle_.attack_ids[pos];
  }
  std::size_t own_pos(int id) const {
    return player_ == Player::attacker ? bundle_.attack_pos(id) : bundle_.defense_pos(id);
  }
  std::size_t opp_pos(int id) const {
    return player_ == Player::attacker ? bundle_.defense_pos(id) : bundle_.attack_pos(id);
  }

  MatrixKind kind() const {
    if (criterion_ == Criterion::penetration_probability) return MatrixKind::penetration;
    return player_ == Player::attacker ? MatrixKind::attacker_utility
                                       : MatrixKind::defender_utility;
  }

  double score(std::size_t own, std::size_t opp) const {
    const double v = raw(own, opp);
    if (criterion_ == Criterion::penetration_probability && player_ == Player::defender) return -v;
    return v;
  }

  CellRef cite(std::size_t own, std::size_t opp) const {
    const auto [i, j] = cell(own, opp);
    return {kind(), bundle_.attack_ids[i], bundle_.defense_ids[j], raw(own, opp)};
  }

  std::string describe(std::size_t own, std::size_t opp) const {
    const auto ref = cite(own, opp);
    return std::string(matrix_symbol(ref.matrix)) + "[" + std::to_string(ref.attack) + "][" +
           std::to_string(ref.defense) + "] = " + number(ref.value);
  }

 private:
  std::pair<std::size_t, std::size_t> cell(std::size_t own, std::size_t opp) const {
    return player_ == Player::attacker ? std::pair{own, opp} : std::pair{opp, own};
  }
  double raw(std::size_t own, std::size_t opp) const {
    const auto [i, j] = cell(own, opp);
    return select(bundle_, kind())(i, j);
  }

  const MatrixBundle& bundle_;
  Player player_;
  Criterion criterion_;
};

// Positions whose value is within tolerance of the maximum.
std::vector<std::size_t> argmax_positions(const std::vector<double>& values) {
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (values[n] >= best - kTieTolerance) out.push_back(n);
  }
  return out;
}

// Lowest strategy id among tied positions.
std::size_t lowest_id(const std::vector<std::size_t>& positions, auto id_of) {
  return *std::min_element(positions.begin(), positions.end(),
                           [&](std::size_t a, std::size_t b) { return id_of(a) < id_of(b); });
}

std::string join_ids(Player player, const std::vector<int>& ids) {
  std::string out;
  for (std::size_t n = 0; n < ids.size(); ++n) {
    if (n) out += ", ";
    out += label(player, ids[n]);
  }
  return out.empty() ? "(none)" : out;
}

void note_tie(SelectionResult& result, Player player, const std::vector<int>& tied, int chosen) {
  if (tied.size() < 2) return;
  result.trace.push_back({"tie between " + join_ids(player, tied) + "; broken by lowest index -> " +
                              label(player, chosen),
                          {}});
}

std::vector<int> sorted_ids(const std::vector<std::size_t>& positions, auto id_of) {
  std::vector<int> ids;
  for (auto p : positions) ids.push_back(id_of(p));
  std::sort(ids.begin(), ids.end());
  return ids;
}

void require_nonempty(const MatrixBundle& bundle) {
  if (bundle.attack_count() == 0 || bundle.defense_count() == 0) {
    throw AnalysisError("bundle has no strategies");
  }
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  return criterion == Criterion::cost_utility ? "cost_utility" : "penetration_probability";
}

std::string_view to_string(Player player) {
  return player == Player::attacker ? "attacker" : "defender";
}

std::string_view to_string(DominanceKind kind) {
  switch (kind) {
    case DominanceKind::strict: return "strict";
    case DominanceKind::weak: return "weak";
    case DominanceKind::epsilon: return "epsilon";
  }
  return "?";
}

Criterion criterion_from_string(std::string_view text) {
  if (text == "cost_utility" || text == "cost-utility" || text == "cost") {
    return Criterion::cost_utility;
  }
  if (text == "penetration_probability" || text == "penetration-probability" ||
      text == "penetration") {
    return Criterion::penetration_probability;
  }
  throw AnalysisError("unknown criterion '" + std::string(text) + "'");
}

Player player_from_string(std::string_view text) {
  if (text == "attacker" || text == "red" || text == "RED") return Player::attacker;
  if (text == "defender" || text == "blue" || text == "BLUE") return Player::defender;
  throw AnalysisError("unknown player '" + std::string(text) + "'");
}

Player opponent_of(Player player) {
  return player == Player::attacker ? Player::defender : Player::attacker;
}

BestResponses best_response_sets(const MatrixBundle& bundle, Criterion criterion) {
  BestResponses out;
  for (Player player : {Player::attacker, Player::defender}) {
    const PayoffView view(bundle, player, criterion);
    auto& target = player == Player::attacker ? out.attacker : out.defender;
    for (std::size_t opp = 0; opp < view.opp_count(); ++opp) {
      std::vector<double> scores(view.own_count());
      for (std::size_t own = 0; own < view.own_count(); ++own) scores[own] = view.score(own, opp);
      auto& set = target[view.opp_id(opp)];
      if (!scores.empty()) {
        set = sorted_ids(argmax_positions(scores), [&](std::size_t p) { return view.own_id(p); });
      }
    }
  }
  return out;
}

std::vector<StrategyPair> find_pure_equilibria(const MatrixBundle& bundle, Criterion criterion) {
  const auto responses = best_response_sets(bundle, criterion);
  std::vector<StrategyPair> out;
  for (int attack : bundle.attack_ids) {
    for (int defense : bundle.defense_ids) {
      const auto& attack_best = responses.attacker.at(defense);
      const auto& defense_best = responses.defender.at(attack);
      if (std::binary_search(attack_best.begin(), attack_best.end(), attack) &&
          std::binary_search(defense_best.begin(), defense_best.end(), defense)) {
        out.push_back({attack, defense});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Dominance> dominated_strategies(const MatrixBundle& bundle, Player player,
                                            Money epsilon, Criterion criterion) {
  if (!(epsilon >= 0.0)) throw AnalysisError("epsilon must be >= 0");
  const PayoffView view(bundle, player, criterion);
  std::vector<Dominance> out;
  for (std::size_t a = 0; a < view.own_count(); ++a) {
    for (std::size_t b = 0; b < view.own_count(); ++b) {
      if (a == b) continue;
      bool all_greater = true;
      bool all_at_least = true;
      bool all_within_epsilon = true;
      bool some_greater = false;
      for (std::size_t o = 0; o < view.opp_count(); ++o) {
        const double diff = view.score(b, o) - view.score(a, o);
        all_greater = all_greater && diff > kTieTolerance;
        all_at_least = all_at_least && diff >= -kTieTolerance;
        all_within_epsilon = all_within_epsilon && diff >= -epsilon - kTieTolerance;
        some_greater = some_greater || diff > kTieTolerance;
      }
      std::optional<DominanceKind> kind;
      if (all_greater && view.opp_count() > 0) {
        kind = DominanceKind::strict;
      } else if (all_at_least && some_greater) {
        kind = DominanceKind::weak;
      } else if (epsilon > 0.0 && all_within_epsilon && some_greater) {
        kind = DominanceKind::epsilon;
      }
      if (kind) out.push_back({view.own_id(a), view.own_id(b), *kind});
    }
  }
  std::sort(out.begin(), out.end(), [](const Dominance& x, const Dominance& y) {
    return std::pair{x.dominated, x.dominating} < std::pair{y.dominated, y.dominating};
  });
  return out;
}

SelectionResult maximin_strategy(const MatrixBundle& bundle, Player player, Criterion criterion) {
  require_nonempty(bundle);
  const PayoffView view(bundle, player, criterion);
  SelectionResult result;
  result.method = "maximin";
  result.player = player;

  std::vector<double> floors(view.own_count());
  std::vector<std::size_t> worst_opp(view.own_count());
  for (std::size_t own = 0; own < view.own_count(); ++own) {
    std::size_t worst = 0;
    for (std::size_t opp = 1; opp < view.opp_count(); ++opp) {
      if (view.score(own, opp) < view.score(own, worst) - kTieTolerance) worst = opp;
    }
    floors[own] = view.score(own, worst);
    worst_opp[own] = worst;
    result.trace.push_back({label(player, view.own_id(own)) + ": worst case " +
                                view.describe(own, worst) + " (against " +
                                label(opponent_of(player), view.opp_id(worst)) + ")",
                            {view.cite(own, worst)}});
  }

  const auto tied = argmax_positions(floors);
  const auto pick = lowest_id(tied, [&](std::size_t p) { return view.own_id(p); });
  result.chosen = {view.own_id(pick)};
  result.values = {view.cite(pick, worst_opp[pick]).value};
  result.trace.push_back({"maximin choice " + label(player, view.own_id(pick)) +
                              " with guaranteed " + view.describe(pick, worst_opp[pick]),
                          {view.cite(pick, worst_opp[pick])}});
  note_tie(result, player, sorted_ids(tied, [&](std::size_t p) { return view.own_id(p); }),
           result.chosen.front());
  return result;
}

SelectionResult play_against_most_likely(const MatrixBundle& bundle, Player player,
                                         int likely_opponent, Criterion criterion) {
  const PayoffView view(bundle, player, criterion);
  std::size_t opp = 0;
  try {
    opp = view.opp_pos(likely_opponent);
  } catch (const std::out_of_range& e) {
    throw AnalysisError(e.what());
  }

  SelectionResult result;
  result.method = "most_likely";
  result.player = player;
  result.trace.push_back({"assume opponent plays " + label(opponent_of(player), likely_opponent),
                          {}});

  std::vector<double> scores(view.own_count());
  for (std::size_t own = 0; own < view.own_count(); ++own) {
    scores[own] = view.score(own, opp);
    result.trace.push_back(
        {label(player, view.own_id(own)) + ": " + view.describe(own, opp), {view.cite(own, opp)}});
  }
  const auto tied = argmax_positions(scores);
  const auto pick = lowest_id(tied, [&](std::size_t p) { return view.own_id(p); });
  result.chosen = {view.own_id(pick)};
  result.values = {view.cite(pick, opp).value};
  result.trace.push_back({"best response " + label(player, view.own_id(pick)) + " with " +
                              view.describe(pick, opp),
                          {view.cite(pick, opp)}});
  note_tie(result, player, sorted_ids(tied, [&](std::size_t p) { return view.own_id(p); }),
           result.chosen.front());
  return result;
}

SelectionResult most_damaging_opponent(const MatrixBundle& bundle, Player player, DamageRule rule,
                                       Criterion criterion) {
  require_nonempty(bundle);
  const PayoffView view(bundle, player, criterion);
  const Player opponent = opponent_of(player);
  SelectionResult result;
  result.player = player;
  const auto opp_id = [&](std::size_t p) { return view.opp_id(p); };

  if (rule == DamageRule::minimax_witness) {
    result.method = "most_damaging_minimax_witness";
    std::vector<double> negated_caps(view.opp_count());
    std::vector<std::size_t> best_reply(view.opp_count());
    for (std::size_t opp = 0; opp < view.opp_count(); ++opp) {
      std::size_t best = 0;
      for (std::size_t own = 1; own < view.own_count(); ++own) {
        if (view.score(own, opp) > view.score(best, opp) + kTieTolerance) best = own;
      }
      best_reply[opp] = best;
      negated_caps[opp] = -view.score(best, opp);
      result.trace.push_back({"against " + label(opponent, view.opp_id(opp)) +
                                  " the best reply " + label(player, view.own_id(best)) +
                                  " reaches only " + view.describe(best, opp),
                              {view.cite(best, opp)}});
    }
    const auto tied = argmax_positions(negated_caps);
    const auto pick = lowest_id(tied, opp_id);
    result.chosen = {view.opp_id(pick)};
    result.values = {view.cite(best_reply[pick], pick).value};
    result.trace.push_back({"most damaging " + label(opponent, view.opp_id(pick)) +
                                " caps the best reply at " +
                                view.describe(best_reply[pick], pick),
                            {view.cite(best_reply[pick], pick)}});
    note_tie(result, opponent, sorted_ids(tied, opp_id), result.chosen.front());
    return result;
  }

  result.method = "most_damaging_plurality";
  std::vector<double> counts(view.opp_count(), 0.0);
  for (std::size_t own = 0; own < view.own_count(); ++own) {
    std::vector<double> negated(view.opp_count());
    for (std::size_t opp = 0; opp < view.opp_count(); ++opp) negated[opp] = -view.score(own, opp);
    const auto minimizers = argmax_positions(negated);
    std::vector<CellRef> cells;
    for (auto opp : minimizers) {
      counts[opp] += 1.0;
      cells.push_back(view.cite(own, opp));
    }
    result.trace.push_back({"against " + label(player, view.own_id(own)) + " the lowest " +
                                std::string(matrix_symbol(view.kind())) + " comes from " +
                                join_ids(opponent, sorted_ids(minimizers, opp_id)) + " (" +
                                view.describe(own, minimizers.front()) + ")",
                            std::move(cells)});
  }
  const auto tied = argmax_positions(counts);
  const auto pick = lowest_id(tied, opp_id);
  result.chosen = {view.opp_id(pick)};
  result.values = {counts[pick]};
  result.trace.push_back({"most damaging " + label(opponent, view.opp_id(pick)) +
                              " is the minimizer against " +
                              std::to_string(static_cast<int>(counts[pick])) + " of " +
                              std::to_string(view.own_count()) + " " +
                              std::string(to_string(player)) + " strategies",
                          {}});
  note_tie(result, opponent, sorted_ids(tied, opp_id), result.chosen.front());
  return result;
}

SelectionResult robust_selection(const MatrixBundle& bundle, Player player,
                                 const std::set<int>& opponent_set, const RobustRule& rule,
                                 Criterion criterion) {
  if (opponent_set.empty()) throw AnalysisError("opponent set is empty");
  const PayoffView view(bundle, player, criterion);
  const Player opponent = opponent_of(player);
  std::vector<std::size_t> opp_positions;
  for (int id : opponent_set) {
    try {
      opp_positions.push_back(view.opp_pos(id));
    } catch (const std::out_of_range& e) {
      throw AnalysisError(e.what());
    }
  }
  const auto own_id = [&](std::size_t p) { return view.own_id(p); };

  SelectionResult result;
  result.player = player;

  if (std::holds_alternative<MaximinOverSet>(rule)) {
    result.method = "robust_maximin_over_set";
    std::vector<double> floors(view.own_count());
    std::vector<std::size_t> worst_opp(view.own_count());
    for (std::size_t own = 0; own < view.own_count(); ++own) {
      std::size_t worst = opp_positions.front();
      for (auto opp : opp_positions) {
        if (view.score(own, opp) < view.score(own, worst) - kTieTolerance) worst = opp;
      }
      floors[own] = view.score(own, worst);
      worst_opp[own] = worst;
      result.trace.push_back({label(player, view.own_id(own)) + ": worst over set " +
                                  view.describe(own, worst),
                              {view.cite(own, worst)}});
    }
    const auto tied = argmax_positions(floors);
    const auto pick = lowest_id(tied, own_id);
    result.chosen = {view.own_id(pick)};
    result.values = {view.cite(pick, worst_opp[pick]).value};
    result.trace.push_back({"robust choice " + label(player, view.own_id(pick)) +
                                " with worst case " + view.describe(pick, worst_opp[pick]),
                            {view.cite(pick, worst_opp[pick])}});
    note_tie(result, player, sorted_ids(tied, own_id), result.chosen.front());
    return result;
  }

  const auto& lex = std::get<Lexicographic>(rule);
  result.method = "robust_lexicographic";
  if (!opponent_set.contains(lex.likely) || !opponent_set.contains(lex.damaging)) {
    throw AnalysisError("likely and damaging strategies must belong to the opponent set");
  }
  const auto likely = view.opp_pos(lex.likely);
  const auto damaging = view.opp_pos(lex.damaging);
  result.trace.push_back({"maximize against likely " + label(opponent, lex.likely) +
                              " subject to utility against damaging " +
                              label(opponent, lex.damaging) + " >= " + number(lex.floor),
                          {}});

  std::vector<std::size_t> feasible;
  for (std::size_t own = 0; own < view.own_count(); ++own) {
    const bool ok = view.score(own, damaging) >= lex.floor - kTieTolerance;
    if (ok) feasible.push_back(own);
    result.trace.push_back({label(player, view.own_id(own)) + ": vs likely " +
                                view.describe(own, likely) + ", vs damaging " +
                                view.describe(own, damaging) + (ok ? " (meets floor)" : " (below floor)"),
                            {view.cite(own, likely), view.cite(own, damaging)}});
  }

  if (feasible.empty()) {
    result.feasible = false;
    std::vector<double> vs_damaging(view.own_count());
    for (std::size_t own = 0; own < view.own_count(); ++own) {
      vs_damaging[own] = view.score(own, damaging);
    }
    const auto tied = argmax_positions(vs_damaging);
    const auto pick = lowest_id(tied, own_id);
    result.chosen = {view.own_id(pick)};
    result.values = {view.cite(pick, likely).value, view.cite(pick, damaging).value};
    result.trace.push_back({"floor infeasible; fallback to best floor " +
                                label(player, view.own_id(pick)) + " with " +
                                view.describe(pick, damaging),
                            {view.cite(pick, damaging)}});
    note_tie(result, player, sorted_ids(tied, own_id), result.chosen.front());
    return result;
  }

  std::vector<double> vs_likely;
  for (auto own : feasible) vs_likely.push_back(view.score(own, likely));
  std::vector<std::size_t> tied;
  for (auto n : argmax_positions(vs_likely)) tied.push_back(feasible[n]);
  const auto pick = lowest_id(tied, own_id);
  result.chosen = {view.own_id(pick)};
  result.values = {view.cite(pick, likely).value, view.cite(pick, damaging).value};
  result.trace.push_back({"choose " + label(player, view.own_id(pick)) + ": " +
                              view.describe(pick, likely) + " vs likely, " +
                              view.describe(pick, damaging) + " vs damaging",
                          {view.cite(pick, likely), view.cite(pick, damaging)}});
  note_tie(result, player, sorted_ids(tied, own_id), result.chosen.front());
  return result;
}

SelectionResult best_responses_result(const MatrixBundle& bundle, Criterion criterion) {
  const auto responses = best_response_sets(bundle, criterion);
  SelectionResult result;
  result.method = "best_responses";
  const PayoffView attacker(bundle, Player::attacker, criterion);
  const PayoffView defender(bundle, Player::defender, criterion);
  for (const auto& [defense, attacks] : responses.attacker) {
    TraceStep step{"attacker best response to " + label(Player::defender, defense) + ": " +
                       join_ids(Player::attacker, attacks),
                   {}};
    for (int a : attacks) step.cells.push_back(attacker.cite(bundle.attack_pos(a), bundle.defense_pos(defense)));
    result.trace.push_back(std::move(step));
  }
  for (const auto& [attack, defenses] : responses.defender) {
    TraceStep step{"defender best response to " + label(Player::attacker, attack) + ": " +
                       join_ids(Player::defender, defenses),
                   {}};
    for (int d : defenses) step.cells.push_back(defender.cite(bundle.defense_pos(d), bundle.attack_pos(attack)));
    result.trace.push_back(std::move(step));
  }
  return result;
}

SelectionResult equilibria_result(const MatrixBundle& bundle, Criterion criterion) {
  SelectionResult result = best_responses_result(bundle, criterion);
  result.method = "pure_equilibria";
  result.pairs = find_pure_equilibria(bundle, criterion);
  const PayoffView attacker(bundle, Player::attacker, criterion);
  const PayoffView defender(bundle, Player::defender, criterion);
  if (result.pairs.empty()) {
    result.trace.push_back({"no cell is a mutual best response: no pure equilibrium", {}});
  }
  for (const auto& pair : result.pairs) {
    const auto i = bundle.attack_pos(pair.attack);
    const auto j = bundle.defense_pos(pair.defense);
    result.trace.push_back({"equilibrium (" + std::to_string(pair.attack) + "," +
                                std::to_string(pair.defense) + "): mutual best responses",
                            {attacker.cite(i, j), defender.cite(j, i)}});
  }
  return result;
}

SelectionResult dominance_result(const MatrixBundle& bundle, Player player, Money epsilon,
                                 Criterion criterion) {
  SelectionResult result;
  result.method = "dominance";
  result.player = player;
  for (const auto& d : dominated_strategies(bundle, player, epsilon, criterion)) {
    if (std::find(result.chosen.begin(), result.chosen.end(), d.dominated) == result.chosen.end()) {
      result.chosen.push_back(d.dominated);
    }
    result.trace.push_back({label(player, d.dominated) + " is dominated (" +
                                std::string(to_string(d.kind)) + ") by " +
                                label(player, d.dominating),
                            {}});
  }
  if (result.trace.empty()) result.trace.push_back({"no dominated strategies", {}});
  return result;
}

}  // namespace coa
