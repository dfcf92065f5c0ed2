#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "coa/analysis.hpp"
#include "coa/http_api.hpp"
#include "coa/matrix_engine.hpp"
#include "coa/montecarlo.hpp"
#include "coa/report.hpp"
#include "coa/scenario_io.hpp"
#include "coa/session.hpp"

namespace fs = std::filesystem;

namespace {

// "aqua" names the bundled exercise scenario.
fs::path resolve_scenario_path(const std::string& arg) {
  if (arg == "aqua") return fs::path(COA_DATA_DIR) / "aqua" / "scenario.json";
  return arg;
}

std::optional<coa::Scenario> load_or_report(const std::string& arg) {
  const auto path = resolve_scenario_path(arg);
  coa::ParseResult parsed;
  try {
    parsed = coa::load_scenario_file(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  if (!parsed.ok()) {
    for (const auto& d : parsed.defects) {
      std::cerr << path.string() << ": " << (d.path.empty() ? "<root>" : d.path) << ": "
                << d.message << "\n";
    }
    return std::nullopt;
  }
  return parsed.scenario;
}

struct ComputeArgs {
  std::string scenario;
  std::string out_dir;
  int precision = 2;
  std::string golden_dir;
  std::string annotations;
  double tolerance = 1e-9;
};

int run_validate(const std::string& scenario) {
  auto s = load_or_report(scenario);
  if (!s) return 1;
  std::cout << "ok: " << s->attack_strategies.size() << " attacks, "
            << s->defense_strategies.size() << " defenses, " << s->mitigations.size()
            << " mitigations, " << s->layers.size() << " layers\n";
  return 0;
}

int run_compute(const ComputeArgs& args) {
  auto scenario = load_or_report(args.scenario);
  if (!scenario) return 1;
  const auto bundle = coa::compute_bundle(*scenario);

  coa::ReportOptions options;
  options.precision = args.precision;
  fs::path annotations_path = args.annotations;
  if (annotations_path.empty() && args.scenario == "aqua") {
    annotations_path = fs::path(COA_DATA_DIR) / "aqua" / "annotations.json";
  }
  if (!annotations_path.empty()) options.annotations = coa::load_annotations(annotations_path);

  if (args.out_dir.empty()) {
    std::cout << coa::text_report(scenario->name, bundle, options);
  } else {
    for (const auto& p : coa::write_report_files(args.out_dir, scenario->name, bundle, options)) {
      std::cout << "wrote " << p.string() << "\n";
    }
  }

  if (args.golden_dir.empty()) return 0;
  bool all_ok = true;
  for (const auto& entry : fs::directory_iterator(args.golden_dir)) {
    if (entry.path().extension() != ".csv") continue;
    const auto golden = coa::load_golden_csv(entry.path());
    coa::LabeledMatrix actual;
    if (golden.name == "strategy_costs") {
      actual = coa::strategy_cost_row(bundle);
    } else {
      actual = coa::labeled(bundle, coa::matrix_kind_from_symbol(golden.name));
    }
    const auto cmp = coa::compare_golden(actual, golden, args.tolerance, options.annotations);
    std::cout << "golden " << golden.name << ": "
              << (cmp.ok() ? "match" : std::to_string(cmp.mismatches.size()) + " mismatches");
    if (!cmp.footnotes.empty()) std::cout << " (" << cmp.footnotes.size() << " annotated)";
    std::cout << "\n";
    for (const auto& m : cmp.mismatches) {
      std::cout << "  " << golden.name << "[" << m.row << "][" << m.col << "] expected "
                << coa::format_fixed(m.expected, 6) << " got " << coa::format_fixed(m.actual, 6)
                << "\n";
    }
    all_ok = all_ok && cmp.ok();
  }
  return all_ok ? 0 : 2;
}

int run_analyze(const std::string& scenario_arg, const coa::AnalysisRequest& request, bool json) {
  auto scenario = load_or_report(scenario_arg);
  if (!scenario) return 1;
  const auto bundle = coa::compute_bundle(*scenario);
  coa::SelectionResult result;
  try {
    result = coa::run_analysis(bundle, request);
  } catch (const coa::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (json) {
    std::cout << coa::selection_to_json(result).dump(2) << "\n";
    return 0;
  }
  std::cout << result.method;
  if (result.player) std::cout << " (" << coa::to_string(*result.player) << ")";
  std::cout << "\n";
  for (const auto& step : result.trace) std::cout << "  - " << step.text << "\n";
  if (!result.chosen.empty()) {
    std::cout << "chosen:";
    for (int id : result.chosen) std::cout << " " << id;
    std::cout << "\n";
  }
  if (!result.pairs.empty()) {
    std::cout << "pairs:";
    for (const auto& p : result.pairs) std::cout << " (" << p.attack << "," << p.defense << ")";
    std::cout << "\n";
  }
  if (!result.feasible) std::cout << "note: no strategy satisfied the constraints\n";
  return 0;
}

struct SimulateArgs {
  std::string scenario;
  std::optional<int> attack;
  std::optional<int> defense;
  coa::SimulationOptions options;
  bool collapsed = false;
  int precision = 6;
};

int run_simulate(SimulateArgs args) {
  auto scenario = load_or_report(args.scenario);
  if (!scenario) return 1;
  if (args.collapsed) args.options.mode = coa::FactorMode::collapsed;
  const auto bundle = coa::compute_bundle(*scenario);

  std::vector<int> attacks, defenses;
  for (const auto& a : scenario->attack_strategies) {
    if (!args.attack || a.id == *args.attack) attacks.push_back(a.id);
  }
  for (const auto& d : scenario->defense_strategies) {
    if (!args.defense || d.id == *args.defense) defenses.push_back(d.id);
  }
  if (attacks.empty() || defenses.empty()) {
    std::cerr << "error: no such strategy pair\n";
    return 1;
  }

  const int p = args.precision;
  std::cout << "i,j,trials,successes,p_hat,ci_halfwidth,P_T,u_a_mean,u_d_mean,seed\n";
  for (int i : attacks) {
    for (int j : defenses) {
      const auto est = coa::simulate_expected_utilities(*scenario, i, j, args.options);
      const double exact = bundle.penetration(bundle.attack_pos(i), bundle.defense_pos(j));
      std::cout << i << "," << j << "," << est.penetration.trials << ","
                << est.penetration.successes << "," << coa::format_fixed(est.penetration.p_hat, p)
                << "," << coa::format_fixed(est.penetration.ci_halfwidth, p) << ","
                << coa::format_fixed(exact, p) << "," << coa::format_fixed(est.attacker_mean, p)
                << "," << coa::format_fixed(est.defender_mean, p) << "," << est.penetration.seed
                << "\n";
    }
  }
  return 0;
}

int run_replay(const std::string& path) {
  coa::ReplayReport report;
  try {
    report = coa::replay_export(coa::Json::parse(coa::read_text_file(path)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& problem : report.problems) std::cout << "mismatch: " << problem << "\n";
  std::cout << (report.ok() ? "replay ok: " : "replay FAILED: ") << report.rounds
            << " rounds\n";
  return report.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Course-of-action analysis for cyber wargames"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario file and list its defects");
  validate->add_option("scenario", validate_path, "Scenario JSON file, or 'aqua'")->required();

  ComputeArgs compute_args;
  auto* compute = app.add_subcommand("compute", "Compute the game matrices and write a report");
  compute->add_option("scenario", compute_args.scenario, "Scenario JSON file, or 'aqua'")
      ->required();
  compute->add_option("-o,--out", compute_args.out_dir,
                      "Directory for CSV tables and report.txt (default: report to stdout)");
  compute->add_option("--precision", compute_args.precision, "Decimals in output")
      ->check(CLI::Range(0, 12));
  compute->add_option("--golden", compute_args.golden_dir,
                      "Directory of reference CSV tables to compare against")
      ->check(CLI::ExistingDirectory);
  compute->add_option("--annotations", compute_args.annotations,
                      "Known-discrepancy annotations JSON")
      ->check(CLI::ExistingFile);
  compute->add_option("--tolerance", compute_args.tolerance, "Absolute comparison tolerance");

  std::string analyze_path;
  coa::AnalysisRequest request;
  bool analyze_json = false;
  std::string method = "pure-equilibria";
  auto* analyze = app.add_subcommand("analyze", "Run a strategy selection method");
  analyze->add_option("scenario", analyze_path, "Scenario JSON file, or 'aqua'")->required();
  analyze->add_option("-m,--method", method, "One of: best-responses, pure-equilibria, dominance, maximin, most-likely, most-damaging, robust");
  std::map<std::string, std::string> option_values;
  for (const char* key :
       {"criterion", "player", "opponent", "rule", "set", "likely", "damaging", "floor", "epsilon"}) {
    analyze->add_option(std::string("--") + key, option_values[key]);
  }
  std::string param_list;
  analyze->add_option("--params", param_list, "Extra parameters as k:v;k:v");
  analyze->add_flag("--json", analyze_json, "Print the result as JSON");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of penetration probability");
  simulate->add_option("scenario", sim_args.scenario, "Scenario JSON file, or 'aqua'")->required();
  simulate->add_option("-a,--attack", sim_args.attack, "Attack id (default: all)");
  simulate->add_option("-d,--defense", sim_args.defense, "Defense id (default: all)");
  simulate->add_option("-n,--trials", sim_args.options.trials)->check(CLI::PositiveNumber);
  simulate->add_option("-s,--seed", sim_args.options.seed);
  simulate->add_option("-t,--threads", sim_args.options.threads)->check(CLI::Range(1u, 64u));
  simulate->add_flag("--collapsed", sim_args.collapsed,
                     "Sample a single factor equal to P_T instead of one per layer");
  simulate->add_option("--precision", sim_args.precision)->check(CLI::Range(0, 12));

  coa::ServiceFlags flags;
  auto* serve = app.add_subcommand("serve", "Run the session HTTP service");
  serve->add_option("--listen", flags.listen, "host:port (env COA_LISTEN)");
  serve->add_option("--data-dir", flags.data_dir, "Session log directory (env COA_DATA_DIR)");
  serve->add_option("--static-dir", flags.static_dir, "Static files to serve at / (env COA_STATIC_DIR)");
  serve->add_option("--precision", flags.precision, "Decimals in formatted output (env COA_PRECISION)");
  serve->add_option("--token", flags.token, "Bearer token required by the API (env COA_TOKEN)");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Recompute a session export and verify its bundles");
  replay->add_option("export", replay_path, "Session export JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(validate_path);
    if (*compute) return run_compute(compute_args);
    if (*analyze) {
      request.method = method;
      if (!param_list.empty()) request.params = coa::parse_param_list(param_list);
      for (const auto& [key, value] : option_values) {
        if (!value.empty()) request.params[key] = value;
      }
      return run_analyze(analyze_path, request, analyze_json);
    }
    if (*simulate) return run_simulate(sim_args);
    if (*serve) return coa::run_service(coa::resolve_service_config(flags, coa::process_environment()));
    if (*replay) return run_replay(replay_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
