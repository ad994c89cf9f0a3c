#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hte/data.hpp"
#include "hte/regression.hpp"

namespace hte {

struct OutcomeSpec {
  enum class Kind { Linear, Polynomial, Spline };
  Kind kind = Kind::Spline;
  int degree = 2;  // Polynomial
  int knots = 5;   // Spline

  std::string tag() const;
};

struct PropensitySpec {
  enum class Kind { LogisticLinear, LogisticPolynomial, Known };
  Kind kind = Kind::LogisticLinear;
  int degree = 3;  // LogisticPolynomial
  double known_value = 0.5;
  // optional known formula pi(1|x); overrides known_value when set
  std::function<double(const Eigen::RowVectorXd&)> known_fn;

  std::string tag() const;
};

// Outcome regression fitted per treatment arm on a shared basis.
struct OutcomeFit {
  Basis basis;
  LeastSquaresFit arm0, arm1;
  std::vector<std::string> warnings;

  // mu(a, x) for a matrix of covariate rows
  Vec evaluate(int arm, const Mat& x) const;
};

struct PropensityFit {
  PropensitySpec spec;
  std::optional<LogisticFit> model;
  std::vector<std::string> warnings;

  // pi(1|x), unclipped
  Vec evaluate1(const Mat& x) const;
};

// Per-row nuisance evaluations used by every downstream statistic. For
// cross-fitted estimates the rows come from models trained without that
// row's fold; the full-data models are kept (when available) for
// evaluating at fresh covariate values.
struct NuisanceFit {
  Vec mu0, mu1;      // per-row outcome regression
  Vec pi1;           // per-row P(A=1|x), clipped to [eps, 1-eps]
  double epsilon = 0.01;
  bool crossfitted = false;
  std::string outcome_method, propensity_method;
  std::vector<std::string> warnings;
  std::shared_ptr<const OutcomeFit> outcome_model;      // null if crossfitted
  std::shared_ptr<const PropensityFit> propensity_model;

  double pi(int arm, int row) const {
    return arm == 1 ? pi1[row] : 1.0 - pi1[row];
  }
  double mu(int arm, int row) const { return arm == 1 ? mu1[row] : mu0[row]; }
};

OutcomeFit fit_outcome(const Sample& sample, const OutcomeSpec& spec);
PropensityFit fit_propensity(const Sample& sample, const PropensitySpec& spec);

NuisanceFit fit_nuisance(const Sample& sample, const OutcomeSpec& ospec,
                         const PropensitySpec& pspec, double epsilon = 0.01);

// k-fold cross-fitting: each row's stored values come from models trained on
// the other folds. Refuses folds whose training data lacks a treatment arm.
NuisanceFit crossfit(const Sample& sample, const OutcomeSpec& ospec,
                     const PropensitySpec& pspec, int k, std::uint64_t seed,
                     double epsilon = 0.01);

}  // namespace hte
