#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hte/cli.hpp"

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& item : in) {
    std::string cur;
    for (char ch : item) {
      if (ch == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

void add_common(CLI::App* cmd, hte::RunConfig& cfg,
                std::vector<std::string>& modifiers) {
  cmd->add_option("--data", cfg.data_path, "input CSV (header y,a,x1..xp)");
  cmd->add_option("--modifier", modifiers,
                  "effect-modifier column(s), e.g. x3 or x1,x2");
  cmd->add_option("--class", cfg.class_name,
                  "policy class: threshold|linear|bv|tree");
  cmd->add_option("--lambda", cfg.lambda, "total-variation budget (bv)");
  cmd->add_option("--grid", cfg.grid, "bv grid bins");
  cmd->add_option("--depth", cfg.depth, "tree depth");
  cmd->add_option("--quantiles", cfg.quantiles, "tree split candidates");
  cmd->add_option("--delta", cfg.delta, "qualitative threshold");
  cmd->add_option("--alpha", cfg.alpha, "test level");
  cmd->add_option("--bootstrap", cfg.bootstrap, "multiplier-bootstrap draws M");
  cmd->add_option("--reps", cfg.reps, "study replications R");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.out, "output path (or prefix for simulate)");
  cmd->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--variance-weighted", cfg.variance_weighted,
                "use variance-weighted statistics");
  cmd->add_option("--outcome", cfg.outcome,
                  "outcome regression: linear|poly|spline");
  cmd->add_option("--outcome-degree", cfg.outcome_degree, "poly degree");
  cmd->add_option("--knots", cfg.outcome_knots, "spline knots per coordinate");
  cmd->add_option("--propensity", cfg.propensity,
                  "propensity: logistic-linear|logistic-poly|known");
  cmd->add_option("--propensity-degree", cfg.propensity_degree, "poly degree");
  cmd->add_option("--propensity-value", cfg.propensity_value,
                  "known propensity P(A=1|x)");
  cmd->add_option("--epsilon", cfg.epsilon, "propensity truncation level");
  cmd->add_option("--crossfit", cfg.crossfit_folds,
                  "cross-fitting folds (0 = off)");
  cmd->add_option("--bins", cfg.comparator_bins, "comparator subgroup bins");
  cmd->add_option("--curve-knots", cfg.curve_knots, "curve spline knots");
}

}  // namespace

int main(int argc, char** argv) {
  // load --config first so explicit flags override file values
  hte::RunConfig cfg;
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      cfg = hte::load_config_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"nonparametric tests for treatment-effect heterogeneity"};
  app.require_subcommand(1);
  std::string config_opt;
  app.add_option("--config", config_opt, "JSON config file (flags override)");

  std::vector<std::string> modifiers, methods, settings_raw, ns_raw;

  CLI::App* quant = app.add_subcommand(
      "test-quant", "test for quantitative effect heterogeneity");
  add_common(quant, cfg, modifiers);

  CLI::App* qual = app.add_subcommand(
      "test-qual", "test for qualitative effect heterogeneity");
  add_common(qual, cfg, modifiers);

  CLI::App* sim =
      app.add_subcommand("simulate", "Monte Carlo operating characteristics");
  add_common(sim, cfg, modifiers);
  sim->add_option("--settings", settings_raw, "DGP settings, e.g. 1,2,3");
  sim->add_option("--n", ns_raw, "sample sizes, e.g. 250,500");
  sim->add_option("--methods", methods,
                  "methods, e.g. quant_monotone,qual_gail_simon");

  CLI::App* curve = app.add_subcommand(
      "curve", "plot-ready CATE curve (spline fit of the pseudo-outcome)");
  add_common(curve, cfg, modifiers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!modifiers.empty()) cfg.modifiers = split_commas(modifiers);
  if (!methods.empty()) cfg.methods = split_commas(methods);
  try {
    if (!settings_raw.empty()) {
      cfg.settings.clear();
      for (const auto& s : split_commas(settings_raw))
        cfg.settings.push_back(std::stoi(s));
    }
    if (!ns_raw.empty()) {
      cfg.ns.clear();
      for (const auto& s : split_commas(ns_raw)) cfg.ns.push_back(std::stoi(s));
    }
  } catch (const std::exception&) {
    std::cerr << "error: --settings/--n expect integers\n";
    return 2;
  }

  if (quant->parsed()) return hte::cmd_test_quant(cfg);
  if (qual->parsed()) return hte::cmd_test_qual(cfg);
  if (sim->parsed()) return hte::cmd_simulate(cfg);
  if (curve->parsed()) return hte::cmd_curve(cfg);
  return 2;
}
