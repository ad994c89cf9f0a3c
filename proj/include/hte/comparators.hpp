#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hte/data.hpp"
#include "hte/pseudo.hpp"

#include "json.hpp"

namespace hte {

// Discretized subgroup effects: per-bin means of the pseudo-outcome with
// standard errors, plus the overall one-step ATE.
struct SubgroupEstimates {
  Vec d;                        // per-bin effect estimates
  Vec s;                        // per-bin standard errors (raw, may be 0)
  Eigen::VectorXi counts;
  std::vector<bool> degenerate; // bins with zero within-bin variance
  double ate = 0.0;
  double ate_se = 0.0;
  int dropped_bins = 0;         // empty bins among the K requested
  int n = 0;

  int k() const { return static_cast<int>(d.size()); }
};

SubgroupEstimates subgroup_aipw(const PseudoOutcomes& pseudo, const Vec& xs_col,
                                int bins);

struct ComparatorReport {
  std::string name;
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  int M = 0;
  std::uint64_t seed = 0;
  int bins_used = 0;
  int dropped_bins = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

// statistic sum_k |d_k - ATE|; null distribution simulated from the
// estimated joint normal of the centered subgroup effects
ComparatorReport unstructured_quant_test(const SubgroupEstimates& est,
                                         double alpha, int M,
                                         std::uint64_t seed);

// min(Q+, Q-) with Q+- the one-sided sums of squared standardized effects;
// Monte Carlo calibration under the least-favorable null
ComparatorReport gail_simon_test(const SubgroupEstimates& est, double alpha,
                                 int M, std::uint64_t seed);

// reject when max_k d_k/s_k > c and min_k d_k/s_k < -c, with c calibrated by
// Monte Carlo under the least-favorable null
ComparatorReport range_test(const SubgroupEstimates& est, double alpha, int M,
                            std::uint64_t seed);

}  // namespace hte
