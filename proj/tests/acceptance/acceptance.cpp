// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coa/analysis.hpp"
#include "coa/montecarlo.hpp"
#include "coa/report.hpp"
#include "properties.hpp"

using namespace coa;
using namespace coa::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kGoldenTolerance = 1e-9;
constexpr double kExactTolerance = 1e-12;
constexpr double kGoldenRuntimeLimit = 1.0;    // seconds
constexpr double kMonteCarloRuntimeLimit = 30.0;  // seconds
constexpr std::uint64_t kMonteCarloTrials = 100000;
constexpr std::size_t kPropertyScenarios = 1000;
constexpr std::uint64_t kPropertySeed = 1;
const std::vector<std::uint64_t> kSeedSet = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

void golden_matrices(Outcome& out) {
  const auto start = Clock::now();
  const auto scenario = load_aqua();
  const auto bundle = compute_bundle(scenario);
  const auto notes = load_annotations(aqua_dir() / "annotations.json");

  std::size_t cells = 0, footnotes = 0;
  for (const char* name : {"strategy_costs", "u_a", "u_d", "P_T"}) {
    const auto golden = load_golden_csv(aqua_dir() / "golden" / (std::string(name) + ".csv"));
    const auto actual = std::string(name) == "strategy_costs"
                            ? strategy_cost_row(bundle)
                            : labeled(bundle, matrix_kind_from_symbol(name));
    const auto cmp = compare_golden(actual, golden, kGoldenTolerance, notes);
    out.require(cmp.ok(), std::string(name) + " has " + std::to_string(cmp.mismatches.size()) +
                              " mismatching cells");
    cells += golden.row_ids.size() * golden.col_ids.size();
    footnotes += cmp.footnotes.size();
  }
  const auto i = bundle.attack_pos(2);
  const auto j = bundle.defense_pos(4);
  out.require(near(bundle.attacker_cost(i, j), 89, kGoldenTolerance), "C_a[2][4] = 89");
  out.require(near(bundle.penetration(i, j), 0.00175, kGoldenTolerance), "P_T[2][4] = 0.00175");
  out.require(near(bundle.attacker_utility(i, j), -87.25, kGoldenTolerance), "u_a[2][4] = -87.25");
  out.require(near(bundle.defender_utility(i, j), 734.25, kGoldenTolerance), "u_d[2][4] = 734.25");
  out.require(footnotes == 3, "printed values of the annotated cells are footnoted");

  ReportOptions opt;
  opt.annotations = notes;
  const auto report = text_report(scenario.name, bundle, opt);
  out.require(report.find("reference table prints -67.75") != std::string::npos &&
                  report.find("reference table prints 734.75") != std::string::npos &&
                  report.find("reference table prints 0.001") != std::string::npos,
              "report footnotes printed values");
  const double in_process = seconds_since(start);

  // The same check through the command-line tool.
  const auto cli = fs::path(COA_BINARY_DIR) / "tools" / "coa";
  const auto out_dir = fs::temp_directory_path() / "coa_acceptance_compute";
  fs::remove_all(out_dir);
  const std::string cmd = "\"" + cli.string() + "\" compute aqua -o \"" + out_dir.string() +
                          "\" --golden \"" + (aqua_dir() / "golden").string() + "\" > /dev/null";
  const auto cli_start = Clock::now();
  const int status = std::system(cmd.c_str());
  const double cli_time = seconds_since(cli_start);
  out.require(status == 0, "coa compute --golden exits 0");
  out.require(fs::exists(out_dir / "u_a.csv"), "coa compute writes u_a.csv");
  fs::remove_all(out_dir);

  out.require(in_process < kGoldenRuntimeLimit, "in-process runtime < 1 s");
  out.require(cli_time < kGoldenRuntimeLimit, "CLI runtime < 1 s");
  out.detail << " " << cells << " cells, " << footnotes << " annotated; runtime "
             << format_fixed(in_process * 1000, 1) << " ms in-process, "
             << format_fixed(cli_time * 1000, 1) << " ms via CLI";
}

void sample_calculation(Outcome& out) {
  const auto bundle = compute_bundle(load_two_layer_sample());
  out.require(bundle.attack_count() == 2 && bundle.defense_count() == 1, "2 x 1 game");
  out.require(near(bundle.attacker_utility(0, 0), -0.5, kExactTolerance), "u_a[1] = -0.5");
  out.require(near(bundle.attacker_utility(1, 0), 21.0, kExactTolerance), "u_a[2] = 21");
  const auto choice = maximin_strategy(bundle, Player::attacker, Criterion::cost_utility);
  out.require(choice.chosen == std::vector<int>{2}, "attacker selects strategy 2");
  const double pt = bundle.penetration(bundle.attack_pos(2), 0);
  out.require(near(pt, 0.72, kExactTolerance), "P_T = 0.72");
  out.detail << " u_a = [" << format_fixed(bundle.attacker_utility(0, 0), 2) << ", "
             << format_fixed(bundle.attacker_utility(1, 0), 2) << "], chosen i=2, P_T = "
             << format_fixed(pt, 2);
}

std::vector<std::vector<std::string>> mark_strings(const MarkGrid& grid) {
  std::vector<std::vector<std::string>> out;
  for (const auto& row : grid.cells) {
    std::vector<std::string> r;
    for (auto m : row) r.emplace_back(mark_text(m));
    out.push_back(r);
  }
  return out;
}

void equilibria_and_marks(Outcome& out) {
  const auto bundle = compute_bundle(load_aqua());
  const auto cost_eq = find_pure_equilibria(bundle, Criterion::cost_utility);
  const auto pen_eq = find_pure_equilibria(bundle, Criterion::penetration_probability);
  out.require(cost_eq.empty(), "no cost-utility equilibrium");
  out.require(pen_eq == std::vector<StrategyPair>{{5, 4}}, "penetration equilibria = {(5,4)}");

  const std::vector<std::vector<std::string>> cost_marks = {
      {"", "", "A", "A", "D"}, {"A", "A", "", "D", ""}, {"", "D", "", "", ""},
      {"", "D", "", "", ""},   {"", "D", "", "", "A"}};
  const std::vector<std::vector<std::string>> pen_marks = {
      {"A", "A", "A", "A", "D"}, {"A", "", "", "", "D"}, {"A", "D", "D", "D", "D"},
      {"", "", "D", "D", "D"},   {"", "D", "D", "D", "AD"}};
  out.require(mark_strings(emit_preference_marks(bundle, Criterion::cost_utility)) == cost_marks,
              "cost-utility mark grid");
  out.require(mark_strings(emit_preference_marks(bundle, Criterion::penetration_probability)) ==
                  pen_marks,
              "penetration mark grid");
  out.detail << " cost utility: none; penetration: (5,4); both mark grids match";
}

void selection_chain(Outcome& out) {
  const auto bundle = compute_bundle(load_aqua());
  const auto c = Criterion::cost_utility;
  const auto maximin = maximin_strategy(bundle, Player::attacker, c);
  out.require(maximin.chosen == std::vector<int>{5} && near(maximin.values.at(0), 210, kGoldenTolerance),
              "attacker maximin i=5 (210)");
  const auto br = play_against_most_likely(bundle, Player::defender, 5, c);
  out.require(br.chosen == std::vector<int>{1} && near(br.values.at(0), 685, kGoldenTolerance),
              "defender vs i=5 -> j=1 (685)");
  const auto damaging = most_damaging_opponent(bundle, Player::defender, DamageRule::plurality, c);
  out.require(damaging.chosen == std::vector<int>{1}, "most damaging (plurality) i=1");
  const auto robust = robust_selection(bundle, Player::defender, {1, 5}, MaximinOverSet{}, c);
  out.require(robust.chosen == std::vector<int>{4} && near(robust.values.at(0), 486, kGoldenTolerance),
              "robust maximin over {1,5} -> j=4 (486)");
  bool lex_ok = true;
  for (double floor : {0.0, 100.0, 200.0, 235.0}) {
    const auto lex = robust_selection(bundle, Player::defender, {1, 5}, Lexicographic{5, 1, floor}, c);
    lex_ok = lex_ok && lex.feasible && lex.chosen == std::vector<int>{1};
  }
  out.require(lex_ok, "lexicographic(5, 1, floor <= 235) -> j=1");

  // The service path must give the same answers.
  const auto via_request = run_analysis(bundle, {"robust", {{"player", "defender"},
                                                            {"rule", "lexicographic"},
                                                            {"likely", "5"},
                                                            {"damaging", "1"},
                                                            {"floor", "200"}}});
  out.require(via_request.chosen == std::vector<int>{1}, "lexicographic via request parameters");
  out.detail << " i=5 (210) -> j=1 (685); damaging i=1; robust j=4 (486); lexicographic j=1";
}

void property_suites(Outcome& out) {
  const auto start = Clock::now();
  const auto tally = run_property_suite(kPropertySeed, kPropertyScenarios);
  out.require(tally.scenarios >= 1000, ">= 1000 scenarios");
  for (const auto& [name, count] : tally.failures) {
    out.require(count == 0, name + " failed " + std::to_string(count) + " times, first " +
                                (count ? tally.first_failure.at(name) : ""));
  }
  out.detail << " " << tally.scenarios << " scenarios x " << tally.failures.size()
             << " properties, " << tally.total_failures() << " failures, "
             << format_fixed(seconds_since(start), 1) << " s";
}

void monte_carlo(Outcome& out) {
  const auto start = Clock::now();
  const auto scenario = load_aqua();
  const auto bundle = compute_bundle(scenario);
  std::size_t runs = 0, inside = 0, utility_inside = 0;
  double worst = 0.0;
  for (int i : bundle.attack_ids) {
    for (int j : bundle.defense_ids) {
      const double p = bundle.penetration(bundle.attack_pos(i), bundle.defense_pos(j));
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(kMonteCarloTrials));
      for (auto seed : kSeedSet) {
        SimulationOptions opt;
        opt.trials = kMonteCarloTrials;
        opt.seed = seed;
        const auto est = simulate_expected_utilities(scenario, i, j, opt);
        ++runs;
        const double dev = std::abs(est.penetration.p_hat - p);
        if (dev <= 3 * sigma) ++inside;
        if (sigma > 0) worst = std::max(worst, dev / sigma);
        const double ua = bundle.attacker_utility(bundle.attack_pos(i), bundle.defense_pos(j));
        const double ud = bundle.defender_utility(bundle.attack_pos(i), bundle.defense_pos(j));
        const double tol = 3 * sigma * bundle.benefit + kGoldenTolerance;
        if (std::abs(est.attacker_mean - ua) <= tol && std::abs(est.defender_mean - ud) <= tol) {
          ++utility_inside;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  out.require(inside == runs, "every run within 3 sigma");
  out.require(utility_inside == runs, "utility means within 3 sigma * b");
  out.require(elapsed < kMonteCarloRuntimeLimit, "runtime < 30 s");
  out.detail << " " << runs << " runs (25 pairs x " << kSeedSet.size() << " seeds x "
             << kMonteCarloTrials << " trials), " << inside << " within 3 sigma, worst "
             << format_fixed(worst, 2) << " sigma, " << format_fixed(elapsed, 1) << " s";
}

void no_secondary_component(Outcome& out) {
  // Nothing in the build tree may come from the web UI.
  std::size_t entries = 0;
  bool clean = true;
  for (const auto& e : fs::recursive_directory_iterator(COA_BINARY_DIR)) {
    ++entries;
    const auto name = e.path().filename().string();
    if (name.find("webui") != std::string::npos || name == "node_modules" || name == "package.json") {
      clean = false;
    }
  }
  out.require(clean, "no web UI artifacts in the build tree");
  out.require(fs::exists(fs::path(COA_BINARY_DIR) / "tools" / "coa"), "coa CLI built");
  out.detail << " build tree scanned (" << entries << " entries), no web UI artifacts";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"golden AQUA matrices", golden_matrices},
      {"two-strategy sample calculation", sample_calculation},
      {"equilibrium findings and preference marks", equilibria_and_marks},
      {"selection chain", selection_chain},
      {"property suites", property_suites},
      {"Monte Carlo agreement", monte_carlo},
      {"runs without the web UI", no_secondary_component},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome out;
    try {
      check(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ":" << out.detail.str() << std::endl;
    if (!out.pass) ++failed;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
