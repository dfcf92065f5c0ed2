#include "coa/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

namespace coa {

namespace {

std::string normalize_method(std::string method) {
  std::replace(method.begin(), method.end(), '_', '-');
  return method;
}

class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  std::optional<std::string> take(const std::string& key) {
    used_.insert(key);
    auto it = raw_.find(key);
    if (it == raw_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  Criterion criterion() {
    auto v = take("criterion");
    return v ? criterion_from_string(*v) : Criterion::cost_utility;
  }

  Player player() {
    auto v = take("player");
    if (!v) throw AnalysisError("missing parameter 'player'");
    return player_from_string(*v);
  }

  std::optional<int> id(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_int(key, *v);
  }

  std::optional<double> number(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    char* end = nullptr;
    const double value = std::strtod(v->c_str(), &end);
    if (end != v->c_str() + v->size() || !std::isfinite(value)) {
      throw AnalysisError("parameter '" + key + "' must be a number, got '" + *v + "'");
    }
    return value;
  }

  std::set<int> id_set(const std::string& key) {
    std::set<int> out;
    auto v = take(key);
    if (!v) return out;
    std::size_t start = 0;
    while (start <= v->size()) {
      const auto comma = v->find(',', start);
      const auto piece = v->substr(start, comma == std::string::npos ? std::string::npos
                                                                    : comma - start);
      if (!piece.empty()) out.insert(parse_int(key, piece));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }

  // Rejects parameters the method never looked at.
  void finish(const std::string& method) const {
    for (const auto& [key, value] : raw_) {
      if (!used_.contains(key)) {
        throw AnalysisError("unknown parameter '" + key + "' for method '" + method + "'");
      }
    }
  }

 private:
  static int parse_int(const std::string& key, const std::string& text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw AnalysisError("parameter '" + key + "' must be an integer id, got '" + text + "'");
    }
    return value;
  }

  const std::map<std::string, std::string>& raw_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<std::string> analysis_methods() {
  return {"best-responses", "pure-equilibria", "dominance", "maximin",
          "most-likely",    "most-damaging",   "robust"};
}

std::map<std::string, std::string> parse_param_list(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    const auto item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto sep = item.find_first_of(":=");
      if (sep == std::string::npos) throw AnalysisError("malformed parameter '" + item + "'");
      out[item.substr(0, sep)] = item.substr(sep + 1);
    }
    start = end + 1;
  }
  return out;
}

SelectionResult run_analysis(const MatrixBundle& bundle, const AnalysisRequest& request) {
  const auto method = normalize_method(request.method);
  Params params(request.params);
  SelectionResult result;

  try {
    if (method == "best-responses") {
      const auto criterion = params.criterion();
      params.finish(method);
      result = best_responses_result(bundle, criterion);
    } else if (method == "pure-equilibria") {
      const auto criterion = params.criterion();
      params.finish(method);
      result = equilibria_result(bundle, criterion);
    } else if (method == "dominance") {
      const auto player = params.player();
      const auto epsilon = params.number("epsilon").value_or(0.0);
      const auto criterion = params.criterion();
      params.finish(method);
      result = dominance_result(bundle, player, epsilon, criterion);
    } else if (method == "maximin") {
      const auto player = params.player();
      const auto criterion = params.criterion();
      params.finish(method);
      result = maximin_strategy(bundle, player, criterion);
    } else if (method == "most-likely") {
      const auto player = params.player();
      const auto opponent = params.id("opponent");
      const auto criterion = params.criterion();
      params.finish(method);
      if (opponent) {
        result = play_against_most_likely(bundle, player, *opponent, criterion);
      } else {
        // No side information: assume the opponent plays its own maximin strategy.
        const auto assumed = maximin_strategy(bundle, opponent_of(player), criterion);
        result = play_against_most_likely(bundle, player, assumed.chosen.front(), criterion);
        result.trace.insert(result.trace.begin(), assumed.trace.begin(), assumed.trace.end());
      }
    } else if (method == "most-damaging") {
      const auto player = params.player();
      const auto rule_text = params.take("rule").value_or("plurality");
      const auto criterion = params.criterion();
      params.finish(method);
      DamageRule rule;
      if (rule_text == "plurality") {
        rule = DamageRule::plurality;
      } else if (rule_text == "minimax_witness" || rule_text == "minimax-witness") {
        rule = DamageRule::minimax_witness;
      } else {
        throw AnalysisError("unknown rule '" + rule_text + "'");
      }
      result = most_damaging_opponent(bundle, player, rule, criterion);
    } else if (method == "robust") {
      const auto player = params.player();
      const auto rule_text = params.take("rule").value_or("maximin_over_set");
      auto set = params.id_set("set");
      const auto likely = params.id("likely");
      const auto damaging = params.id("damaging");
      const auto floor = params.number("floor").value_or(0.0);
      const auto criterion = params.criterion();
      params.finish(method);
      if (rule_text == "maximin_over_set" || rule_text == "maximin-over-set") {
        result = robust_selection(bundle, player, set, MaximinOverSet{}, criterion);
      } else if (rule_text == "lexicographic") {
        if (!likely || !damaging) {
          throw AnalysisError("lexicographic rule needs 'likely' and 'damaging'");
        }
        set.insert(*likely);
        set.insert(*damaging);
        result = robust_selection(bundle, player, set, Lexicographic{*likely, *damaging, floor},
                                  criterion);
      } else {
        throw AnalysisError("unknown rule '" + rule_text + "'");
      }
    } else {
      throw AnalysisError("unknown method '" + request.method + "'");
    }
  } catch (const std::out_of_range& e) {
    throw AnalysisError(e.what());
  }
  return result;
}

}  // namespace coa
