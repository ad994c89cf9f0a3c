#pragma once

#include <string>
#include <vector>

#include "hte/data.hpp"

namespace hte {

// Additive basis over the columns of a covariate matrix: intercept plus,
// per coordinate, either raw polynomial terms or a natural cubic spline
// (linear extrapolation beyond the boundary knots).
struct Basis {
  enum class Kind { Polynomial, NaturalSpline };
  Kind kind = Kind::Polynomial;
  int degree = 1;                           // polynomial only
  std::vector<std::vector<double>> knots;   // spline: per-coordinate knots

  Mat design(const Mat& x) const;
  int n_terms(int p) const;

  static Basis polynomial(int degree);
  // knots at equally spaced quantiles of each coordinate of x
  static Basis natural_spline(const Mat& x, int knots_per_coord);
};

// Least squares with a rank-deficiency fallback to a small ridge penalty
// (intercept unpenalized).
struct LeastSquaresFit {
  Basis basis;
  Vec coef;
  bool ridged = false;
  double sigma2 = 0.0;   // RSS / (n - rank)
  Mat xtx_inv;          // for pointwise standard errors (ridged if needed)
  int rank = 0;

  Vec predict(const Mat& x) const;
};

LeastSquaresFit fit_least_squares(const Mat& x, const Vec& y, const Basis& basis,
                                  double ridge = 1e-8);

// Logistic regression via damped Newton iterations. Outputs are finite even
// under separation; callers clip probabilities.
struct LogisticFit {
  Basis basis;
  Vec coef;
  bool converged = true;
  bool separation = false;

  Vec predict_prob(const Mat& x) const;
};

LogisticFit fit_logistic(const Mat& x, const Eigen::VectorXi& y01,
                         const Basis& basis, int max_iter = 50);

}  // namespace hte
