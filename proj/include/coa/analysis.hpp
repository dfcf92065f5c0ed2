#pragma once

#include <map>
#include <string>
#include <vector>

#include "coa/game_analysis.hpp"

namespace coa {

// A named analysis method plus string parameters, as received from the CLI or
// an HTTP query string.
//
// Methods and parameters (criterion defaults to cost_utility everywhere):
//   best-responses   criterion
//   pure-equilibria  criterion
//   dominance        player, epsilon (default 0), criterion
//   maximin          player, criterion
//   most-likely      player, opponent (default: the opponent's maximin strategy), criterion
//   most-damaging    player, rule = plurality | minimax_witness (default plurality), criterion
//   robust           player, rule = maximin_over_set | lexicographic, set = "1,5",
//                    likely, damaging, floor (default 0), criterion
struct AnalysisRequest {
  std::string method;
  std::map<std::string, std::string> params;
};

std::vector<std::string> analysis_methods();

// Parses "k:v;k:v" (or "k=v;k=v") into params, for the ?params= form.
std::map<std::string, std::string> parse_param_list(const std::string& text);

// Throws AnalysisError for unknown methods, unknown or malformed parameters and
// unknown strategy ids.
SelectionResult run_analysis(const MatrixBundle& bundle, const AnalysisRequest& request);

}  // namespace coa
