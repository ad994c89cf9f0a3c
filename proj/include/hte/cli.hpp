#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hte {

// One flat configuration document; every CLI flag mirrors a key here and
// flags override values loaded from --config JSON.
struct RunConfig {
  std::string data_path;
  std::vector<std::string> modifiers;
  std::string class_name = "threshold";  // threshold|linear|bv|tree
  double lambda = 2.0;
  int grid = 100;  // bounded-variation bins
  int depth = 2;
  int quantiles = 20;
  double delta = 0.0;
  double alpha = 0.05;
  int bootstrap = -1;  // multiplier-bootstrap draws M; -1: per-command default
                       // (1000 for tests, 500 for simulate)
  int reps = 500;      // study replications R
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;  // 0: hardware concurrency
  bool variance_weighted = false;

  std::string outcome = "spline";  // linear|poly|spline
  int outcome_degree = 2;
  int outcome_knots = 5;
  std::string propensity = "logistic-poly";  // logistic-linear|logistic-poly|known
  int propensity_degree = 3;
  double propensity_value = 0.5;
  double epsilon = 0.01;
  int crossfit_folds = 0;  // 0: no cross-fitting

  std::vector<int> settings{1};
  std::vector<int> ns{500};
  std::vector<std::string> methods{"quant_monotone"};
  int comparator_bins = 100;

  int curve_knots = 5;

  nlohmann::json to_json() const;
  void apply_json(const nlohmann::json& j);
};

RunConfig load_config_file(const std::string& path);

// command implementations; exit codes: 0 done, 2 validation/usage, 3 runtime
int cmd_test_quant(const RunConfig& config);
int cmd_test_qual(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_curve(const RunConfig& config);

}  // namespace hte
