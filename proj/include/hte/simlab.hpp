#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hte/comparators.hpp"
#include "hte/data.hpp"
#include "hte/het_test.hpp"
#include "hte/nuisance.hpp"

namespace hte {

struct DgpConfig {
  int setting = 1;  // 1..5
  int n = 500;
  std::uint64_t seed = 1;
  double noise_sd = 3.0;

  void validate() const;
};

// closed-form pieces of the data-generating process
double dgp_gamma(int setting, double x3);          // CATE given x3
double dgp_propensity(double x1, double x2);       // P(A=1|x)
double dgp_mean_outcome(const Eigen::RowVectorXd& x, int a, int setting);

// n iid rows; effect modifier s = {x3}
Sample simulate(const DgpConfig& config);

enum class Method {
  QuantMonotone,      // quant test, constant-threshold class
  QuantNonmonotone,   // quant test, bounded-variation class
  QuantUnstructured,  // discretized comparator
  QualMonotone,
  QualNonmonotone,
  QualGailSimon,
  QualRange,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct StudyConfig {
  std::vector<int> settings{1};
  std::vector<int> ns{500};
  std::vector<Method> methods{Method::QuantMonotone};
  int R = 500;
  int M = 500;
  double alpha = 0.05;
  double delta = 0.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  double lambda = 2.0;
  int bv_bins = 100;
  int comparator_bins = 100;
  double epsilon = 0.01;
  OutcomeSpec outcome;        // default: additive natural spline, 5 knots
  PropensitySpec propensity;  // default: logistic-polynomial(3)

  StudyConfig() {
    outcome.kind = OutcomeSpec::Kind::Spline;
    outcome.knots = 5;
    propensity.kind = PropensitySpec::Kind::LogisticPolynomial;
    propensity.degree = 3;
  }
};

struct StudyRow {
  std::string method;
  int setting = 0;
  int n = 0;
  int R = 0;
  int failures = 0;
  double proportion = 0.0;
  double mcse = 0.0;
  double seconds = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// cell-completion callback for progress reporting
using StudyProgress = std::function<void(const StudyRow&)>;

StudyReport run_study(const StudyConfig& config,
                      const StudyProgress& progress = nullptr);

// single replication of one (setting, n, method) cell; exposed so any
// replication can be reproduced in isolation
bool run_replication(const StudyConfig& config, int setting, int n,
                     Method method, std::uint64_t cell_index, int rep_index);

}  // namespace hte
