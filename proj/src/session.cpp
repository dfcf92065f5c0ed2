#include "coa/session.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace coa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

AttackStrategy& attack_ref(Scenario& s, int id) {
  for (auto& a : s.attack_strategies) {
    if (a.id == id) return a;
  }
  throw AmendmentError("unknown attack strategy " + std::to_string(id));
}

DefenseStrategy& defense_ref(Scenario& s, int id) {
  for (auto& d : s.defense_strategies) {
    if (d.id == id) return d;
  }
  throw AmendmentError("unknown defense strategy " + std::to_string(id));
}

Mitigation& mitigation_ref(Scenario& s, int id) {
  for (auto& m : s.mitigations) {
    if (m.id == id) return m;
  }
  throw AmendmentError("unknown mitigation " + std::to_string(id));
}

DifferentialEffect& effect_ref(Scenario& s, int attack_id, int mitigation, std::optional<int> layer) {
  auto& attack = attack_ref(s, attack_id);
  const std::string target = "attack " + std::to_string(attack_id) + " / mitigation " +
                             std::to_string(mitigation);
  if (layer) {
    for (auto& e : attack.differential_effects) {
      if (e.mitigation_id == mitigation && e.layer == *layer) return e;
    }
    DifferentialEffect fresh;
    fresh.mitigation_id = mitigation;
    fresh.layer = *layer;
    fresh.note = "added by amendment";
    attack.differential_effects.push_back(fresh);
    return attack.differential_effects.back();
  }
  DifferentialEffect* found = nullptr;
  for (auto& e : attack.differential_effects) {
    if (e.mitigation_id != mitigation) continue;
    if (found) throw AmendmentError(target + " has effects at several layers; name the layer");
    found = &e;
  }
  if (!found) throw AmendmentError(target + " has no effect; name a layer to add one");
  return *found;
}

void apply_one(Scenario& s, const AmendmentOp& op) {
  std::visit(
      Overloaded{
          [&](const SetEffectProbability& a) {
            effect_ref(s, a.attack, a.mitigation, a.layer).success_prob = a.value;
          },
          [&](const SetEffectCost& a) {
            effect_ref(s, a.attack, a.mitigation, a.layer).extra_cost = a.value;
          },
          [&](const SetFixedTerm& a) {
            auto& attack = attack_ref(s, a.attack);
            if (a.term >= attack.fixed_terms.size()) {
              throw AmendmentError("attack " + std::to_string(a.attack) + " has no fixed term " +
                                   std::to_string(a.term));
            }
            auto& term = attack.fixed_terms[a.term];
            if (a.cost) term.cost = *a.cost;
            if (a.success_prob) term.success_prob = *a.success_prob;
          },
          [&](const SetMitigationCost& a) { mitigation_ref(s, a.mitigation).cost = a.value; },
          [&](const SetBenefit& a) { s.benefit = a.value; },
          [&](const MarkLayerCompromised& a) {
            if (!s.has_layer(a.layer)) {
              throw AmendmentError("unknown layer " + std::to_string(a.layer));
            }
            auto& attack = attack_ref(s, a.attack);
            for (auto& term : attack.fixed_terms) {
              if (term.layer == a.layer) {
                term.cost = 0.0;
                term.success_prob = 1.0;
              }
            }
            for (auto& e : attack.differential_effects) {
              if (e.layer == a.layer) {
                e.extra_cost = 0.0;
                e.success_prob = 1.0;
              }
            }
          },
          [&](const AddMitigation& a) { s.mitigations.push_back(a.mitigation); },
          [&](const RemoveMitigation& a) {
            mitigation_ref(s, a.mitigation);
            std::erase_if(s.mitigations, [&](const Mitigation& m) { return m.id == a.mitigation; });
            for (auto& d : s.defense_strategies) d.mitigation_ids.erase(a.mitigation);
            for (auto& atk : s.attack_strategies) {
              std::erase_if(atk.differential_effects, [&](const DifferentialEffect& e) {
                return e.mitigation_id == a.mitigation;
              });
            }
          },
          [&](const AddDefenseStrategy& a) { s.defense_strategies.push_back(a.strategy); },
          [&](const RemoveDefenseStrategy& a) {
            defense_ref(s, a.defense);
            std::erase_if(s.defense_strategies,
                          [&](const DefenseStrategy& d) { return d.id == a.defense; });
          },
          [&](const AddAttackStrategy& a) { s.attack_strategies.push_back(a.strategy); },
          [&](const RemoveAttackStrategy& a) {
            attack_ref(s, a.attack);
            std::erase_if(s.attack_strategies,
                          [&](const AttackStrategy& x) { return x.id == a.attack; });
          },
          [&](const AddStrategyMitigation& a) {
            mitigation_ref(s, a.mitigation);
            defense_ref(s, a.defense).mitigation_ids.insert(a.mitigation);
          },
          [&](const RemoveStrategyMitigation& a) {
            if (defense_ref(s, a.defense).mitigation_ids.erase(a.mitigation) == 0) {
              throw AmendmentError("defense strategy " + std::to_string(a.defense) +
                                   " does not contain mitigation " + std::to_string(a.mitigation));
            }
          },
      },
      op);
}

int require_int(const Json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number_integer()) {
    throw AmendmentError(std::string("amendment field '") + key + "' must be an integer");
  }
  return it->get<int>();
}

std::optional<int> optional_int(const Json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw AmendmentError(std::string("amendment field '") + key + "' must be an integer");
  }
  return it->get<int>();
}

double require_number(const Json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number()) {
    throw AmendmentError(std::string("amendment field '") + key + "' must be a number");
  }
  return it->get<double>();
}

Money require_money(const Json& node, const char* key, double labor_rate) {
  auto it = node.find(key);
  if (it == node.end()) throw AmendmentError(std::string("amendment field '") + key + "' missing");
  std::vector<Defect> defects;
  auto money = read_money(*it, key, labor_rate, defects);
  if (!money) throw AmendmentError(defects.empty() ? "bad money value" : defects.front().message);
  return *money;
}

template <typename T>
T require_item(std::optional<T> item, const std::vector<Defect>& defects) {
  if (!item) {
    std::string message = "invalid amendment item:";
    for (const auto& d : defects) message += " " + d.path + ": " + d.message + ";";
    throw AmendmentError(message);
  }
  return std::move(*item);
}

Json layer_json(std::optional<int> layer) { return layer ? Json(*layer) : Json(nullptr); }

}  // namespace

std::string_view to_string(Cell cell) {
  switch (cell) {
    case Cell::red: return "RED";
    case Cell::blue: return "BLUE";
    case Cell::white: return "WHITE";
  }
  return "WHITE";
}

Cell cell_from_string(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "RED") return Cell::red;
  if (upper == "BLUE") return Cell::blue;
  if (upper == "WHITE") return Cell::white;
  throw AmendmentError("unknown cell '" + std::string(text) + "'");
}

std::string_view amendment_kind(const AmendmentOp& op) {
  return std::visit(Overloaded{
                        [](const SetEffectProbability&) { return "set_effect_probability"; },
                        [](const SetEffectCost&) { return "set_effect_cost"; },
                        [](const SetFixedTerm&) { return "set_fixed_term"; },
                        [](const SetMitigationCost&) { return "set_mitigation_cost"; },
                        [](const SetBenefit&) { return "set_benefit"; },
                        [](const MarkLayerCompromised&) { return "mark_layer_compromised"; },
                        [](const AddMitigation&) { return "add_mitigation"; },
                        [](const RemoveMitigation&) { return "remove_mitigation"; },
                        [](const AddDefenseStrategy&) { return "add_defense_strategy"; },
                        [](const RemoveDefenseStrategy&) { return "remove_defense_strategy"; },
                        [](const AddAttackStrategy&) { return "add_attack_strategy"; },
                        [](const RemoveAttackStrategy&) { return "remove_attack_strategy"; },
                        [](const AddStrategyMitigation&) { return "add_strategy_mitigation"; },
                        [](const RemoveStrategyMitigation&) { return "remove_strategy_mitigation"; },
                    },
                    op);
}

Scenario apply_amendments(Scenario scenario, std::span<const Amendment> amendments) {
  for (const auto& amendment : amendments) apply_one(scenario, amendment.op);
  require_valid(scenario);
  return scenario;
}

Json amendment_to_json(const Amendment& amendment) {
  Json j = Json::object();
  j["kind"] = std::string(amendment_kind(amendment.op));
  j["author"] = std::string(to_string(amendment.author));
  std::visit(Overloaded{
                 [&](const SetEffectProbability& a) {
                   j["attack"] = a.attack;
                   j["mitigation"] = a.mitigation;
                   j["layer"] = layer_json(a.layer);
                   j["value"] = a.value;
                 },
                 [&](const SetEffectCost& a) {
                   j["attack"] = a.attack;
                   j["mitigation"] = a.mitigation;
                   j["layer"] = layer_json(a.layer);
                   j["value"] = a.value;
                 },
                 [&](const SetFixedTerm& a) {
                   j["attack"] = a.attack;
                   j["term"] = a.term;
                   j["cost"] = a.cost ? Json(*a.cost) : Json(nullptr);
                   j["success_prob"] = a.success_prob ? Json(*a.success_prob) : Json(nullptr);
                 },
                 [&](const SetMitigationCost& a) {
                   j["mitigation"] = a.mitigation;
                   j["value"] = a.value;
                 },
                 [&](const SetBenefit& a) { j["value"] = a.value; },
                 [&](const MarkLayerCompromised& a) {
                   j["attack"] = a.attack;
                   j["layer"] = a.layer;
                 },
                 [&](const AddMitigation& a) { j["item"] = to_json(a.mitigation); },
                 [&](const RemoveMitigation& a) { j["mitigation"] = a.mitigation; },
                 [&](const AddDefenseStrategy& a) { j["item"] = to_json(a.strategy); },
                 [&](const RemoveDefenseStrategy& a) { j["defense"] = a.defense; },
                 [&](const AddAttackStrategy& a) { j["item"] = to_json(a.strategy); },
                 [&](const RemoveAttackStrategy& a) { j["attack"] = a.attack; },
                 [&](const AddStrategyMitigation& a) {
                   j["defense"] = a.defense;
                   j["mitigation"] = a.mitigation;
                 },
                 [&](const RemoveStrategyMitigation& a) {
                   j["defense"] = a.defense;
                   j["mitigation"] = a.mitigation;
                 },
             },
             amendment.op);
  return j;
}

Amendment amendment_from_json(const Json& node, double labor_rate) {
  if (!node.is_object()) throw AmendmentError("amendment must be an object");
  const auto kind_it = node.find("kind");
  if (kind_it == node.end() || !kind_it->is_string()) {
    throw AmendmentError("amendment needs a string 'kind'");
  }
  const auto kind = kind_it->get<std::string>();
  Amendment out;
  if (auto author = node.find("author"); author != node.end()) {
    if (!author->is_string()) throw AmendmentError("amendment 'author' must be a string");
    out.author = cell_from_string(author->get<std::string>());
  }

  std::vector<Defect> defects;
  if (kind == "set_effect_probability") {
    out.op = SetEffectProbability{require_int(node, "attack"), require_int(node, "mitigation"),
                                  optional_int(node, "layer"), require_number(node, "value")};
  } else if (kind == "set_effect_cost") {
    out.op = SetEffectCost{require_int(node, "attack"), require_int(node, "mitigation"),
                           optional_int(node, "layer"), require_money(node, "value", labor_rate)};
  } else if (kind == "set_fixed_term") {
    SetFixedTerm op;
    op.attack = require_int(node, "attack");
    const int term = require_int(node, "term");
    if (term < 0) throw AmendmentError("amendment field 'term' must be >= 0");
    op.term = static_cast<std::size_t>(term);
    if (auto it = node.find("cost"); it != node.end() && !it->is_null()) {
      op.cost = require_money(node, "cost", labor_rate);
    }
    if (auto it = node.find("success_prob"); it != node.end() && !it->is_null()) {
      op.success_prob = require_number(node, "success_prob");
    }
    out.op = op;
  } else if (kind == "set_mitigation_cost") {
    out.op = SetMitigationCost{require_int(node, "mitigation"),
                               require_money(node, "value", labor_rate)};
  } else if (kind == "set_benefit") {
    out.op = SetBenefit{require_money(node, "value", labor_rate)};
  } else if (kind == "mark_layer_compromised") {
    out.op = MarkLayerCompromised{require_int(node, "attack"), require_int(node, "layer")};
  } else if (kind == "add_mitigation") {
    out.op = AddMitigation{require_item(
        read_mitigation(node.value("item", Json()), "item", labor_rate, defects), defects)};
  } else if (kind == "remove_mitigation") {
    out.op = RemoveMitigation{require_int(node, "mitigation")};
  } else if (kind == "add_defense_strategy") {
    out.op = AddDefenseStrategy{
        require_item(read_defense_strategy(node.value("item", Json()), "item", defects), defects)};
  } else if (kind == "remove_defense_strategy") {
    out.op = RemoveDefenseStrategy{require_int(node, "defense")};
  } else if (kind == "add_attack_strategy") {
    out.op = AddAttackStrategy{require_item(
        read_attack_strategy(node.value("item", Json()), "item", labor_rate, defects), defects)};
  } else if (kind == "remove_attack_strategy") {
    out.op = RemoveAttackStrategy{require_int(node, "attack")};
  } else if (kind == "add_strategy_mitigation") {
    out.op = AddStrategyMitigation{require_int(node, "defense"), require_int(node, "mitigation")};
  } else if (kind == "remove_strategy_mitigation") {
    out.op = RemoveStrategyMitigation{require_int(node, "defense"),
                                      require_int(node, "mitigation")};
  } else {
    throw AmendmentError("unknown amendment kind '" + kind + "'");
  }
  return out;
}

Json decisions_to_json(const Decisions& d) {
  Json j = Json::object();
  j["attack"] = d.attack ? Json(*d.attack) : Json(nullptr);
  j["defense"] = d.defense ? Json(*d.defense) : Json(nullptr);
  j["rationale"] = d.rationale;
  return j;
}

Decisions decisions_from_json(const Json& node) {
  if (!node.is_object()) throw AmendmentError("decisions must be an object");
  Decisions d;
  d.attack = optional_int(node, "attack");
  d.defense = optional_int(node, "defense");
  if (auto it = node.find("rationale"); it != node.end() && !it->is_null()) {
    if (!it->is_string()) throw AmendmentError("decisions 'rationale' must be a string");
    d.rationale = it->get<std::string>();
  }
  return d;
}

Json round_to_json(const SessionRound& round) {
  Json j = Json::object();
  j["index"] = round.index;
  j["committed_at"] = round.committed_at;
  j["amendments"] = Json::array();
  for (const auto& a : round.amendments) j["amendments"].push_back(amendment_to_json(a));
  j["decisions"] = round.decisions ? decisions_to_json(*round.decisions) : Json(nullptr);
  j["bundle"] = bundle_to_json(round.bundle);
  return j;
}

Json session_summary_json(const Session& session) {
  Json j = Json::object();
  j["id"] = session.id;
  j["name"] = session.scenario().name;
  j["created_at"] = session.created_at;
  j["updated_at"] = session.updated_at;
  j["latest_round"] = session.rounds.back().index;
  j["rounds"] = Json::array();
  for (const auto& r : session.rounds) {
    Json summary = Json::object();
    summary["index"] = r.index;
    summary["committed_at"] = r.committed_at;
    summary["amendment_count"] = r.amendments.size();
    summary["decisions"] = r.decisions ? decisions_to_json(*r.decisions) : Json(nullptr);
    j["rounds"].push_back(std::move(summary));
  }
  return j;
}

Json export_session(const Session& session) {
  Json j = Json::object();
  j["format"] = "coa-session-export";
  j["version"] = 1;
  j["id"] = session.id;
  j["created_at"] = session.created_at;
  j["updated_at"] = session.updated_at;
  j["scenario"] = scenario_to_json(session.rounds.front().scenario);
  j["rounds"] = Json::array();
  for (const auto& r : session.rounds) j["rounds"].push_back(round_to_json(r));
  return j;
}

ReplayReport replay_export(const Json& exported) {
  ReplayReport report;
  if (!exported.is_object() || !exported.contains("scenario") || !exported.contains("rounds")) {
    report.problems.push_back("export lacks 'scenario' or 'rounds'");
    return report;
  }
  auto parsed = parse_scenario_json(exported.at("scenario"));
  if (!parsed.ok()) {
    for (const auto& d : parsed.defects) {
      report.problems.push_back("scenario." + d.path + ": " + d.message);
    }
    return report;
  }
  Scenario current = *parsed.scenario;
  const auto& rounds = exported.at("rounds");
  for (std::size_t n = 0; n < rounds.size(); ++n) {
    const auto& r = rounds[n];
    const std::string where = "round " + std::to_string(n);
    try {
      if (r.at("index").get<std::size_t>() != n) {
        report.problems.push_back(where + ": index out of sequence");
        return report;
      }
      std::vector<Amendment> amendments;
      for (const auto& a : r.at("amendments")) {
        amendments.push_back(amendment_from_json(a, current.labor_rate));
      }
      if (n == 0 && !amendments.empty()) {
        report.problems.push_back(where + ": round 0 must not carry amendments");
      }
      current = apply_amendments(current, amendments);
      const auto recomputed = compute_bundle(current);
      if (!(recomputed == bundle_from_json(r.at("bundle")))) {
        report.problems.push_back(where + ": stored bundle differs from recomputation");
      }
    } catch (const std::exception& e) {
      report.problems.push_back(where + ": " + e.what());
      return report;
    }
    ++report.rounds;
  }
  if (report.rounds == 0) report.problems.push_back("export has no rounds");
  return report;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto secs = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

RoundConflict::RoundConflict(std::size_t expected, std::size_t current)
    : std::runtime_error("stale base round " + std::to_string(expected) + "; current round is " +
                         std::to_string(current)),
      current_(current) {}

SessionStore::SessionStore(std::optional<std::filesystem::path> data_dir)
    : data_dir_(std::move(data_dir)) {
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
             static_cast<std::uint64_t>(
                 std::chrono::steady_clock::now().time_since_epoch().count());
  if (data_dir_) {
    std::filesystem::create_directories(*data_dir_);
    load_existing();
  }
}

std::string SessionStore::new_id() {
  std::lock_guard lock(id_mutex_);
  for (;;) {
    std::uint64_t x = id_salt_ + 0x9e3779b97f4a7c15ULL * ++id_counter_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    std::shared_lock registry(registry_mutex_);
    if (!sessions_.contains(buf)) return buf;
  }
}

void SessionStore::persist_line(const std::string& id, const Json& line) const {
  if (!data_dir_) return;
  const auto path = *data_dir_ / (id + ".jsonl");
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << line.dump() << "\n";
  out.flush();
  if (!out) throw std::runtime_error("cannot append to session log " + path.string());
}

void SessionStore::load_existing() {
  for (const auto& entry : std::filesystem::directory_iterator(*data_dir_)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    auto session_entry = std::make_shared<Entry>();
    auto& session = session_entry->session;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto record = Json::parse(line);
      const auto type = record.at("type").get<std::string>();
      if (type == "session") {
        auto parsed = parse_scenario_json(record.at("scenario"));
        if (!parsed.ok()) {
          throw std::runtime_error("corrupt session log " + entry.path().string());
        }
        session.id = record.at("id").get<std::string>();
        session.created_at = record.at("created_at").get<std::string>();
        session.updated_at = session.created_at;
        SessionRound zero;
        zero.scenario = *parsed.scenario;
        zero.bundle = compute_bundle(zero.scenario);
        zero.committed_at = session.created_at;
        session.rounds.push_back(std::move(zero));
      } else if (type == "round") {
        if (session.rounds.empty()) {
          throw std::runtime_error("round before session header in " + entry.path().string());
        }
        SessionRound round;
        round.index = record.at("index").get<std::size_t>();
        if (round.index != session.rounds.size()) {
          throw std::runtime_error("round out of sequence in " + entry.path().string());
        }
        const double rate = session.scenario().labor_rate;
        for (const auto& a : record.at("amendments")) {
          round.amendments.push_back(amendment_from_json(a, rate));
        }
        if (!record.at("decisions").is_null()) {
          round.decisions = decisions_from_json(record.at("decisions"));
        }
        round.scenario = apply_amendments(session.scenario(), round.amendments);
        round.bundle = compute_bundle(round.scenario);
        round.committed_at = record.at("committed_at").get<std::string>();
        session.updated_at = round.committed_at;
        session.rounds.push_back(std::move(round));
      }
    }
    if (!session.rounds.empty()) sessions_[session.id] = std::move(session_entry);
  }
}

Session SessionStore::create(const Scenario& scenario) {
  require_valid(scenario);
  auto entry = std::make_shared<Entry>();
  auto& session = entry->session;
  session.id = new_id();
  session.created_at = utc_timestamp();
  session.updated_at = session.created_at;
  SessionRound zero;
  zero.scenario = scenario;
  zero.bundle = compute_bundle(scenario);
  zero.committed_at = session.created_at;
  session.rounds.push_back(std::move(zero));

  Json header = Json::object();
  header["type"] = "session";
  header["id"] = session.id;
  header["created_at"] = session.created_at;
  header["scenario"] = scenario_to_json(scenario);
  persist_line(session.id, header);

  std::unique_lock lock(registry_mutex_);
  sessions_[session.id] = entry;
  return session;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("unknown session '" + id + "'");
  return it->second;
}

SessionRound SessionStore::append_round(const std::string& id, std::vector<Amendment> amendments,
                                        std::optional<Decisions> decisions,
                                        std::optional<std::size_t> expected_base_round) {
  auto entry = find(id);

  // Recompute outside the lock, then commit only if no other writer got in first.
  for (;;) {
    std::size_t base = 0;
    Scenario base_scenario;
    {
      std::lock_guard lock(entry->mutex);
      base = entry->session.rounds.back().index;
      if (expected_base_round && *expected_base_round != base) {
        throw RoundConflict(*expected_base_round, base);
      }
      base_scenario = entry->session.scenario();
    }
    SessionRound round;
    round.index = base + 1;
    round.scenario = apply_amendments(std::move(base_scenario), amendments);
    round.bundle = compute_bundle(round.scenario);

    std::lock_guard lock(entry->mutex);
    auto& session = entry->session;
    if (session.rounds.back().index != base) {
      if (expected_base_round) {
        throw RoundConflict(*expected_base_round, session.rounds.back().index);
      }
      continue;
    }
    round.amendments = std::move(amendments);
    round.decisions = std::move(decisions);
    round.committed_at = utc_timestamp();

    Json line = Json::object();
    line["type"] = "round";
    line["index"] = round.index;
    line["committed_at"] = round.committed_at;
    line["amendments"] = Json::array();
    for (const auto& a : round.amendments) line["amendments"].push_back(amendment_to_json(a));
    line["decisions"] = round.decisions ? decisions_to_json(*round.decisions) : Json(nullptr);
    persist_line(id, line);

    session.rounds.push_back(round);
    session.updated_at = round.committed_at;
    return round;
  }
}

Session SessionStore::get(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

SessionRound SessionStore::round(const std::string& id, std::size_t index) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mutex);
  const auto& rounds = entry->session.rounds;
  if (index >= rounds.size()) {
    throw RoundNotFound("session '" + id + "' has no round " + std::to_string(index));
  }
  return rounds[index];
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

SelectionResult SessionStore::query_analysis(const std::string& id, std::size_t round_index,
                                             const AnalysisRequest& request) const {
  const auto r = round(id, round_index);
  return run_analysis(r.bundle, request);
}

}  // namespace coa
