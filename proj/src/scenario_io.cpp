#include "coa/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace coa {

namespace {

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

std::string index_path(const std::string& base, std::size_t n) {
  return base + "[" + std::to_string(n) + "]";
}

std::string type_name(const Json& node) { return node.type_name(); }

// Reads one JSON object, recording a defect for every missing, mistyped or
// unknown key instead of stopping at the first.
class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string path, std::vector<Defect>& defects,
               std::initializer_list<std::string_view> allowed)
      : node_(node), path_(std::move(path)), defects_(defects) {
    if (!node_.is_object()) {
      fail(path_, "expected an object, got " + type_name(node_));
      valid_ = false;
      return;
    }
    for (const auto& [key, value] : node_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(join_path(path_, key), "unknown key '" + key + "'");
      }
    }
  }

  bool valid() const { return valid_; }
  const std::string& path() const { return path_; }

  const Json* get(std::string_view key, bool required) {
    if (!valid_) return nullptr;
    auto it = node_.find(std::string(key));
    if (it == node_.end() || (it->is_null() && required)) {
      if (required) fail(join_path(path_, key), "missing required key '" + std::string(key) + "'");
      return nullptr;
    }
    return &*it;
  }

  std::optional<int> integer(std::string_view key, bool required = true) {
    const Json* v = get(key, required);
    if (v == nullptr || v->is_null()) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(join_path(path_, key), "expected an integer, got " + type_name(*v));
      return std::nullopt;
    }
    return v->get<int>();
  }

  std::optional<double> number(std::string_view key, bool required = true) {
    const Json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    if (!v->is_number()) {
      fail(join_path(path_, key), "expected a number, got " + type_name(*v));
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::string text(std::string_view key, bool required = false) {
    const Json* v = get(key, required);
    if (v == nullptr) return {};
    if (!v->is_string()) {
      fail(join_path(path_, key), "expected a string, got " + type_name(*v));
      return {};
    }
    return v->get<std::string>();
  }

  const Json* array(std::string_view key, bool required = true) {
    const Json* v = get(key, required);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) {
      fail(join_path(path_, key), "expected an array, got " + type_name(*v));
      return nullptr;
    }
    return v;
  }

  std::optional<Money> money(std::string_view key, double labor_rate, bool required = true) {
    const Json* v = get(key, required);
    if (v == nullptr) return std::nullopt;
    return read_money(*v, join_path(path_, key), labor_rate, defects_);
  }

  void fail(std::string path, std::string message) {
    defects_.push_back({std::move(path), std::move(message)});
  }

 private:
  const Json& node_;
  std::string path_;
  std::vector<Defect>& defects_;
  bool valid_ = true;
};

std::optional<FixedAttackTerm> read_fixed_term(const Json& node, const std::string& path,
                                               double labor_rate, std::vector<Defect>& defects) {
  const auto before = defects.size();
  ObjectReader r(node, path, defects, {"layer", "cost", "success_prob", "note"});
  FixedAttackTerm term;
  term.layer = r.integer("layer", false);
  if (auto cost = r.money("cost", labor_rate)) term.cost = *cost;
  if (auto p = r.number("success_prob", false)) term.success_prob = *p;
  term.note = r.text("note");
  if (defects.size() != before) return std::nullopt;
  return term;
}

std::optional<DifferentialEffect> read_effect(const Json& node, const std::string& path,
                                              double labor_rate, std::vector<Defect>& defects) {
  const auto before = defects.size();
  ObjectReader r(node, path, defects,
                 {"mitigation_id", "layer", "extra_cost", "success_prob", "note"});
  DifferentialEffect effect;
  if (auto id = r.integer("mitigation_id")) effect.mitigation_id = *id;
  if (auto layer = r.integer("layer")) effect.layer = *layer;
  if (auto cost = r.money("extra_cost", labor_rate, false)) effect.extra_cost = *cost;
  if (auto p = r.number("success_prob")) effect.success_prob = *p;
  effect.note = r.text("note");
  if (defects.size() != before) return std::nullopt;
  return effect;
}

template <typename T, typename Fn>
std::vector<T> read_list(const Json* list, const std::string& path, Fn&& read_one) {
  std::vector<T> out;
  if (list == nullptr) return out;
  for (std::size_t n = 0; n < list->size(); ++n) {
    if (auto item = read_one((*list)[n], index_path(path, n))) out.push_back(std::move(*item));
  }
  return out;
}

std::string describe_position(std::string_view document, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t n = 0; n < byte && n < document.size(); ++n) {
    if (document[n] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::optional<Money> read_money(const Json& node, const std::string& path, double labor_rate,
                                std::vector<Defect>& defects) {
  if (node.is_number()) return node.get<double>();
  const auto before = defects.size();
  ObjectReader r(node, path, defects, {"amount", "unit"});
  const auto amount = r.number("amount");
  const auto unit = r.text("unit", true);
  if (defects.size() != before || !amount) return std::nullopt;
  if (unit == "k$") return *amount;
  if (unit == "hr") return *amount * labor_rate;
  r.fail(join_path(path, "unit"), "unknown cost unit '" + unit + "' (expected \"k$\" or \"hr\")");
  return std::nullopt;
}

std::optional<Mitigation> read_mitigation(const Json& node, const std::string& path,
                                          double labor_rate, std::vector<Defect>& defects) {
  const auto before = defects.size();
  ObjectReader r(node, path, defects, {"id", "name", "cost"});
  Mitigation m;
  if (auto id = r.integer("id")) m.id = *id;
  m.name = r.text("name");
  if (auto cost = r.money("cost", labor_rate)) m.cost = *cost;
  if (defects.size() != before) return std::nullopt;
  return m;
}

std::optional<DefenseStrategy> read_defense_strategy(const Json& node, const std::string& path,
                                                     std::vector<Defect>& defects) {
  const auto before = defects.size();
  ObjectReader r(node, path, defects, {"id", "name", "mitigation_ids"});
  DefenseStrategy d;
  if (auto id = r.integer("id")) d.id = *id;
  d.name = r.text("name");
  if (const Json* ids = r.array("mitigation_ids")) {
    for (std::size_t n = 0; n < ids->size(); ++n) {
      const auto& v = (*ids)[n];
      if (!v.is_number_integer()) {
        r.fail(index_path(join_path(path, "mitigation_ids"), n), "expected an integer");
      } else if (!d.mitigation_ids.insert(v.get<int>()).second) {
        r.fail(index_path(join_path(path, "mitigation_ids"), n),
               "mitigation id " + std::to_string(v.get<int>()) + " listed twice");
      }
    }
  }
  if (defects.size() != before) return std::nullopt;
  return d;
}

std::optional<AttackStrategy> read_attack_strategy(const Json& node, const std::string& path,
                                                   double labor_rate,
                                                   std::vector<Defect>& defects) {
  const auto before = defects.size();
  ObjectReader r(node, path, defects, {"id", "name", "fixed_terms", "differential_effects"});
  AttackStrategy a;
  if (auto id = r.integer("id")) a.id = *id;
  a.name = r.text("name");
  a.fixed_terms = read_list<FixedAttackTerm>(
      r.array("fixed_terms", false), join_path(path, "fixed_terms"),
      [&](const Json& n, const std::string& p) { return read_fixed_term(n, p, labor_rate, defects); });
  a.differential_effects = read_list<DifferentialEffect>(
      r.array("differential_effects", false), join_path(path, "differential_effects"),
      [&](const Json& n, const std::string& p) { return read_effect(n, p, labor_rate, defects); });
  if (defects.size() != before) return std::nullopt;
  return a;
}

ParseResult parse_scenario_json(const Json& document) {
  ParseResult result;
  auto& defects = result.defects;
  ObjectReader r(document, "", defects,
                 {"name", "benefit", "labor_rate", "layers", "mitigations", "defense_strategies",
                  "attack_strategies"});
  if (!r.valid()) return result;

  Scenario s;
  s.name = r.text("name");
  if (auto rate = r.number("labor_rate", false)) s.labor_rate = *rate;
  if (auto b = r.money("benefit", s.labor_rate)) s.benefit = *b;

  s.layers = read_list<LayerSpec>(
      r.array("layers"), "layers",
      [&](const Json& n, const std::string& p) -> std::optional<LayerSpec> {
        const auto before = defects.size();
        ObjectReader lr(n, p, defects, {"index", "description"});
        LayerSpec layer;
        if (auto idx = lr.integer("index")) layer.index = *idx;
        layer.description = lr.text("description");
        if (defects.size() != before) return std::nullopt;
        return layer;
      });
  s.mitigations = read_list<Mitigation>(
      r.array("mitigations"), "mitigations",
      [&](const Json& n, const std::string& p) { return read_mitigation(n, p, s.labor_rate, defects); });
  s.defense_strategies = read_list<DefenseStrategy>(
      r.array("defense_strategies"), "defense_strategies",
      [&](const Json& n, const std::string& p) { return read_defense_strategy(n, p, defects); });
  s.attack_strategies = read_list<AttackStrategy>(
      r.array("attack_strategies"), "attack_strategies",
      [&](const Json& n, const std::string& p) {
        return read_attack_strategy(n, p, s.labor_rate, defects);
      });

  if (!defects.empty()) return result;
  auto report = validate(s);
  if (!report.ok()) {
    defects = std::move(report.defects);
    return result;
  }
  result.scenario = std::move(s);
  return result;
}

ParseResult parse_scenario(std::string_view document) {
  Json parsed;
  try {
    parsed = Json::parse(document);
  } catch (const Json::parse_error& e) {
    ParseResult result;
    result.defects.push_back({describe_position(document, e.byte == 0 ? 0 : e.byte - 1),
                              std::string("syntax error: ") + e.what()});
    return result;
  }
  return parse_scenario_json(parsed);
}

ParseResult load_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path));
}

Json money_json(Money value) {
  Json j = Json::object();
  j["amount"] = value;
  j["unit"] = "k$";
  return j;
}

Json to_json(const Mitigation& m) {
  Json j = Json::object();
  j["id"] = m.id;
  j["name"] = m.name;
  j["cost"] = money_json(m.cost);
  return j;
}

Json to_json(const DefenseStrategy& d) {
  Json j = Json::object();
  j["id"] = d.id;
  j["name"] = d.name;
  j["mitigation_ids"] = Json::array();
  for (int id : d.mitigation_ids) j["mitigation_ids"].push_back(id);
  return j;
}

Json to_json(const AttackStrategy& a) {
  Json j = Json::object();
  j["id"] = a.id;
  j["name"] = a.name;
  j["fixed_terms"] = Json::array();
  for (const auto& t : a.fixed_terms) {
    Json term = Json::object();
    if (t.layer) term["layer"] = *t.layer;
    term["cost"] = money_json(t.cost);
    term["success_prob"] = t.success_prob;
    term["note"] = t.note;
    j["fixed_terms"].push_back(std::move(term));
  }
  j["differential_effects"] = Json::array();
  for (const auto& e : a.differential_effects) {
    Json effect = Json::object();
    effect["mitigation_id"] = e.mitigation_id;
    effect["layer"] = e.layer;
    effect["extra_cost"] = money_json(e.extra_cost);
    effect["success_prob"] = e.success_prob;
    effect["note"] = e.note;
    j["differential_effects"].push_back(std::move(effect));
  }
  return j;
}

Json scenario_to_json(const Scenario& s) {
  Json j = Json::object();
  j["name"] = s.name;
  j["benefit"] = money_json(s.benefit);
  j["labor_rate"] = s.labor_rate;
  j["layers"] = Json::array();
  for (const auto& l : s.layers) {
    j["layers"].push_back(Json{{"index", l.index}, {"description", l.description}});
  }
  j["mitigations"] = Json::array();
  for (const auto& m : s.mitigations) j["mitigations"].push_back(to_json(m));
  j["defense_strategies"] = Json::array();
  for (const auto& d : s.defense_strategies) j["defense_strategies"].push_back(to_json(d));
  j["attack_strategies"] = Json::array();
  for (const auto& a : s.attack_strategies) j["attack_strategies"].push_back(to_json(a));
  return j;
}

std::string serialize_scenario(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Json defects_to_json(const std::vector<Defect>& defects) {
  Json out = Json::array();
  for (const auto& d : defects) out.push_back(Json{{"path", d.path}, {"message", d.message}});
  return out;
}

Json matrix_to_json(const Matrix& matrix) {
  Json out = Json::array();
  for (std::size_t r = 0; r < matrix.rows(); ++r) out.push_back(matrix.row(r));
  return out;
}

Matrix matrix_from_json(const Json& node) {
  if (!node.is_array()) throw std::invalid_argument("matrix must be an array of rows");
  const std::size_t rows = node.size();
  const std::size_t cols = rows == 0 ? 0 : node[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!node[r].is_array() || node[r].size() != cols) {
      throw std::invalid_argument("matrix rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = node[r][c].get<double>();
  }
  return m;
}

Json bundle_to_json(const MatrixBundle& bundle) {
  Json j = Json::object();
  j["attack_ids"] = bundle.attack_ids;
  j["defense_ids"] = bundle.defense_ids;
  j["benefit"] = bundle.benefit;
  for (auto kind : kAllMatrixKinds) {
    j[std::string(matrix_symbol(kind))] = matrix_to_json(select(bundle, kind));
  }
  return j;
}

MatrixBundle bundle_from_json(const Json& node) {
  MatrixBundle b;
  b.attack_ids = node.at("attack_ids").get<std::vector<int>>();
  b.defense_ids = node.at("defense_ids").get<std::vector<int>>();
  b.benefit = node.at("benefit").get<double>();
  b.attacker_cost = matrix_from_json(node.at("C_a"));
  b.defender_cost = matrix_from_json(node.at("C_d"));
  b.penetration = matrix_from_json(node.at("P_T"));
  b.attacker_utility = matrix_from_json(node.at("u_a"));
  b.defender_utility = matrix_from_json(node.at("u_d"));
  return b;
}

Json selection_to_json(const SelectionResult& result) {
  Json j = Json::object();
  j["method"] = result.method;
  j["player"] = result.player ? Json(std::string(to_string(*result.player))) : Json(nullptr);
  j["chosen"] = result.chosen;
  j["pairs"] = Json::array();
  for (const auto& p : result.pairs) j["pairs"].push_back(Json::array({p.attack, p.defense}));
  j["values"] = result.values;
  j["feasible"] = result.feasible;
  j["trace"] = Json::array();
  for (const auto& step : result.trace) {
    Json s = Json::object();
    s["text"] = step.text;
    s["cells"] = Json::array();
    for (const auto& c : step.cells) {
      s["cells"].push_back(Json{{"matrix", std::string(matrix_symbol(c.matrix))},
                                {"attack", c.attack},
                                {"defense", c.defense},
                                {"value", c.value}});
    }
    j["trace"].push_back(std::move(s));
  }
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace coa
