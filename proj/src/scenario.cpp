#include "coa/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

namespace coa {

namespace {

std::string indexed(std::string_view base, std::size_t index) {
  return std::string(base) + "[" + std::to_string(index) + "]";
}

class DefectCollector {
 public:
  void add(std::string path, std::string message) {
    report_.defects.push_back({std::move(path), std::move(message)});
  }

  void check_money(const std::string& path, double value) {
    if (!std::isfinite(value)) {
      add(path, "must be a finite number");
    } else if (value < 0.0) {
      add(path, "must be >= 0 (got " + std::to_string(value) + ")");
    }
  }

  void check_probability(const std::string& path, double value) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
      add(path, "probability must lie in [0, 1] (got " + std::to_string(value) + ")");
    }
  }

  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

}  // namespace

const Mitigation* Scenario::find_mitigation(int id) const {
  auto it = std::find_if(mitigations.begin(), mitigations.end(),
                         [id](const Mitigation& m) { return m.id == id; });
  return it == mitigations.end() ? nullptr : &*it;
}

const DefenseStrategy* Scenario::find_defense(int id) const {
  auto it = std::find_if(defense_strategies.begin(), defense_strategies.end(),
                         [id](const DefenseStrategy& d) { return d.id == id; });
  return it == defense_strategies.end() ? nullptr : &*it;
}

const AttackStrategy* Scenario::find_attack(int id) const {
  auto it = std::find_if(attack_strategies.begin(), attack_strategies.end(),
                         [id](const AttackStrategy& a) { return a.id == id; });
  return it == attack_strategies.end() ? nullptr : &*it;
}

bool Scenario::has_layer(int index) const {
  return std::any_of(layers.begin(), layers.end(),
                     [index](const LayerSpec& l) { return l.index == index; });
}

InvalidScenario::InvalidScenario(ValidationReport report)
    : std::runtime_error([&report] {
        std::string what = "invalid scenario:";
        for (const auto& d : report.defects) what += " " + d.path + ": " + d.message + ";";
        return what;
      }()),
      report_(std::move(report)) {}

ValidationReport validate(const Scenario& scenario) {
  DefectCollector out;

  out.check_money("benefit", scenario.benefit);
  out.check_money("labor_rate", scenario.labor_rate);

  if (scenario.layers.empty()) {
    out.add("layers", "layers empty");
  }
  for (std::size_t n = 0; n < scenario.layers.size(); ++n) {
    const int expected = static_cast<int>(n) + 1;
    if (scenario.layers[n].index != expected) {
      out.add(indexed("layers", n) + ".index",
              "layer indices must run 1..N_l in order; expected " + std::to_string(expected) +
                  ", got " + std::to_string(scenario.layers[n].index));
    }
  }

  std::map<int, std::size_t> seen_mitigations;
  for (std::size_t n = 0; n < scenario.mitigations.size(); ++n) {
    const auto& m = scenario.mitigations[n];
    const auto path = indexed("mitigations", n);
    if (auto [it, fresh] = seen_mitigations.emplace(m.id, n); !fresh) {
      out.add(path + ".id", "duplicate mitigation id " + std::to_string(m.id) +
                                " (first at mitigations[" + std::to_string(it->second) + "])");
    }
    out.check_money(path + ".cost", m.cost);
  }

  if (scenario.defense_strategies.empty()) {
    out.add("defense_strategies", "defense_strategies empty");
  }
  std::map<int, std::size_t> seen_defenses;
  for (std::size_t n = 0; n < scenario.defense_strategies.size(); ++n) {
    const auto& d = scenario.defense_strategies[n];
    const auto path = indexed("defense_strategies", n);
    if (auto [it, fresh] = seen_defenses.emplace(d.id, n); !fresh) {
      out.add(path + ".id", "duplicate defense strategy id " + std::to_string(d.id));
    }
    for (int mid : d.mitigation_ids) {
      if (!seen_mitigations.contains(mid)) {
        out.add(path + ".mitigation_ids", "unknown mitigation id " + std::to_string(mid));
      }
    }
  }

  if (scenario.attack_strategies.empty()) {
    out.add("attack_strategies", "attack_strategies empty");
  }
  std::map<int, std::size_t> seen_attacks;
  for (std::size_t n = 0; n < scenario.attack_strategies.size(); ++n) {
    const auto& a = scenario.attack_strategies[n];
    const auto path = indexed("attack_strategies", n);
    if (auto [it, fresh] = seen_attacks.emplace(a.id, n); !fresh) {
      out.add(path + ".id", "duplicate attack strategy id " + std::to_string(a.id));
    }
    for (std::size_t t = 0; t < a.fixed_terms.size(); ++t) {
      const auto& term = a.fixed_terms[t];
      const auto tpath = path + indexed(".fixed_terms", t);
      if (term.layer && !scenario.has_layer(*term.layer)) {
        out.add(tpath + ".layer", "unknown layer " + std::to_string(*term.layer));
      }
      out.check_money(tpath + ".cost", term.cost);
      out.check_probability(tpath + ".success_prob", term.success_prob);
    }
    std::map<std::pair<int, int>, std::size_t> seen_pairs;
    for (std::size_t e = 0; e < a.differential_effects.size(); ++e) {
      const auto& effect = a.differential_effects[e];
      const auto epath = path + indexed(".differential_effects", e);
      if (!seen_mitigations.contains(effect.mitigation_id)) {
        out.add(epath + ".mitigation_id",
                "unknown mitigation id " + std::to_string(effect.mitigation_id));
      }
      if (!scenario.has_layer(effect.layer)) {
        out.add(epath + ".layer", "unknown layer " + std::to_string(effect.layer));
      }
      out.check_money(epath + ".extra_cost", effect.extra_cost);
      out.check_probability(epath + ".success_prob", effect.success_prob);
      const std::pair key{effect.mitigation_id, effect.layer};
      if (auto [it, fresh] = seen_pairs.emplace(key, e); !fresh) {
        out.add(epath, "duplicate effect for mitigation " + std::to_string(key.first) +
                           " at layer " + std::to_string(key.second) +
                           " (first at differential_effects[" + std::to_string(it->second) +
                           "])");
      }
    }
  }

  return out.take();
}

void require_valid(const Scenario& scenario) {
  auto report = validate(scenario);
  if (!report.ok()) throw InvalidScenario(std::move(report));
}

std::size_t TranslationMatrix::row_sum(std::size_t row) const {
  return std::accumulate(rows.at(row).begin(), rows.at(row).end(), std::size_t{0});
}

TranslationMatrix build_translation_matrix(const Scenario& scenario) {
  require_valid(scenario);
  TranslationMatrix out;
  for (const auto& m : scenario.mitigations) out.mitigation_ids.push_back(m.id);
  for (const auto& d : scenario.defense_strategies) {
    out.defense_ids.push_back(d.id);
    std::vector<std::uint8_t> row(out.mitigation_ids.size(), 0);
    for (std::size_t k = 0; k < out.mitigation_ids.size(); ++k) {
      row[k] = d.mitigation_ids.contains(out.mitigation_ids[k]) ? 1 : 0;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace coa
