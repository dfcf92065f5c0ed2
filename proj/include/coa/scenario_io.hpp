#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coa/game_analysis.hpp"
#include "coa/matrix_engine.hpp"
#include "coa/scenario.hpp"

namespace coa {

using Json = nlohmann::ordered_json;

// Result of reading a scenario document. `scenario` is set only when there are
// no defects; syntax defects carry "line L, column C" paths, schema and
// validation defects carry field paths.
struct ParseResult {
  std::optional<Scenario> scenario;
  std::vector<Defect> defects;

  bool ok() const { return scenario.has_value(); }
};

ParseResult parse_scenario(std::string_view document);
ParseResult parse_scenario_json(const Json& document);
ParseResult load_scenario_file(const std::filesystem::path& path);

// Canonical document: fixed key order, costs tagged with unit "k$".
Json scenario_to_json(const Scenario& scenario);
std::string serialize_scenario(const Scenario& scenario);

// Sub-object readers shared with the session amendment codec. Defects are
// appended with `path` as prefix; return nullopt when the object is unusable.
// `labor_rate` converts "hr" costs to k$.
std::optional<Mitigation> read_mitigation(const Json& node, const std::string& path,
                                          double labor_rate, std::vector<Defect>& defects);
std::optional<DefenseStrategy> read_defense_strategy(const Json& node, const std::string& path,
                                                     std::vector<Defect>& defects);
std::optional<AttackStrategy> read_attack_strategy(const Json& node, const std::string& path,
                                                   double labor_rate,
                                                   std::vector<Defect>& defects);
// Accepts a bare number (k$) or {"amount": x, "unit": "k$" | "hr"}.
std::optional<Money> read_money(const Json& node, const std::string& path, double labor_rate,
                                std::vector<Defect>& defects);

Json to_json(const Mitigation& mitigation);
Json to_json(const DefenseStrategy& strategy);
Json to_json(const AttackStrategy& strategy);
Json money_json(Money value);

Json defects_to_json(const std::vector<Defect>& defects);

Json matrix_to_json(const Matrix& matrix);
Matrix matrix_from_json(const Json& node);

Json bundle_to_json(const MatrixBundle& bundle);
MatrixBundle bundle_from_json(const Json& node);

Json selection_to_json(const SelectionResult& result);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace coa
