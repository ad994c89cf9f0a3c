#include "hte/regression.hpp"

#include <algorithm>
#include <cmath>

namespace hte {

namespace {

double quantile_linear(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const int lo = static_cast<int>(std::floor(pos));
  const int hi = std::min<int>(lo + 1, static_cast<int>(v.size()) - 1);
  const double w = pos - lo;
  return (1.0 - w) * v[lo] + w * v[hi];
}

inline double pos3(double t) { return t > 0.0 ? t * t * t : 0.0; }

}  // namespace

Basis Basis::polynomial(int degree) {
  Basis b;
  b.kind = Kind::Polynomial;
  b.degree = std::max(1, degree);
  return b;
}

Basis Basis::natural_spline(const Mat& x, int knots_per_coord) {
  Basis b;
  b.kind = Kind::NaturalSpline;
  const int p = static_cast<int>(x.cols());
  b.knots.resize(p);
  const int K = std::max(3, knots_per_coord);
  for (int j = 0; j < p; ++j) {
    std::vector<double> col(x.rows());
    for (int i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    std::vector<double> ks;
    for (int k = 1; k <= K; ++k)
      ks.push_back(quantile_linear(col, static_cast<double>(k) / (K + 1)));
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    b.knots[j] = ks;  // fewer than 3 distinct knots degrades to linear
  }
  return b;
}

int Basis::n_terms(int p) const {
  if (kind == Kind::Polynomial) return 1 + p * degree;
  int t = 1;
  for (int j = 0; j < p; ++j) {
    const int K = static_cast<int>(knots[j].size());
    t += 1 + (K >= 3 ? K - 2 : 0);
  }
  return t;
}

Mat Basis::design(const Mat& x) const {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  Mat d(n, n_terms(p));
  d.col(0).setOnes();
  int c = 1;
  if (kind == Kind::Polynomial) {
    for (int j = 0; j < p; ++j) {
      for (int k = 1; k <= degree; ++k) {
        for (int i = 0; i < n; ++i) d(i, c) = std::pow(x(i, j), k);
        ++c;
      }
    }
  } else {
    for (int j = 0; j < p; ++j) {
      d.col(c++) = x.col(j);
      const auto& ks = knots[j];
      const int K = static_cast<int>(ks.size());
      if (K < 3) continue;
      const double xK = ks[K - 1], xKm1 = ks[K - 2];
      for (int k = 0; k < K - 2; ++k) {
        for (int i = 0; i < n; ++i) {
          const double xi = x(i, j);
          const double dk =
              (pos3(xi - ks[k]) - pos3(xi - xK)) / (xK - ks[k]);
          const double dl =
              (pos3(xi - xKm1) - pos3(xi - xK)) / (xK - xKm1);
          d(i, c) = dk - dl;
        }
        ++c;
      }
    }
  }
  return d;
}

LeastSquaresFit fit_least_squares(const Mat& x, const Vec& y,
                                  const Basis& basis, double ridge) {
  LeastSquaresFit fit;
  fit.basis = basis;
  const Mat d = basis.design(x);
  const int n = static_cast<int>(d.rows());
  const int q = static_cast<int>(d.cols());

  Eigen::ColPivHouseholderQR<Mat> qr(d);
  qr.setThreshold(1e-10);
  fit.rank = static_cast<int>(qr.rank());
  Mat xtx = d.transpose() * d;
  if (fit.rank < q) {
    fit.ridged = true;
    for (int j = 1; j < q; ++j) xtx(j, j) += ridge;  // intercept unpenalized
    fit.coef = xtx.ldlt().solve(d.transpose() * y);
  } else {
    fit.coef = qr.solve(y);
  }
  const Vec resid = y - d * fit.coef;
  const int dof = std::max(1, n - fit.rank);
  fit.sigma2 = resid.squaredNorm() / dof;
  fit.xtx_inv = xtx.ldlt().solve(Mat::Identity(q, q));
  return fit;
}

Vec LeastSquaresFit::predict(const Mat& x) const {
  return basis.design(x) * coef;
}

LogisticFit fit_logistic(const Mat& x, const Eigen::VectorXi& y01,
                         const Basis& basis, int max_iter) {
  LogisticFit fit;
  fit.basis = basis;
  const Mat d = basis.design(x);
  const int n = static_cast<int>(d.rows());
  const int q = static_cast<int>(d.cols());
  Vec beta = Vec::Zero(q);
  Vec yv(n);
  for (int i = 0; i < n; ++i) yv[i] = y01[i];

  auto neg_loglik = [&](const Vec& b) {
    const Vec eta = d * b;
    double nll = 0.0;
    for (int i = 0; i < n; ++i) {
      // log(1 + exp(eta)) - y*eta, computed stably
      const double e = eta[i];
      nll += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)));
      nll -= yv[i] * e;
    }
    return nll;
  };

  double nll = neg_loglik(beta);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const Vec eta = d * beta;
    Vec prob(n), w(n);
    for (int i = 0; i < n; ++i) {
      prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
      w[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-10);
    }
    Mat h = d.transpose() * w.asDiagonal() * d;
    for (int j = 0; j < q; ++j) h(j, j) += 1e-10;
    const Vec grad = d.transpose() * (yv - prob);
    Vec step = h.ldlt().solve(grad);
    double t = 1.0;
    Vec cand = beta + step;
    double cand_nll = neg_loglik(cand);
    int halvings = 0;
    while (cand_nll > nll + 1e-12 && halvings < 30) {
      t *= 0.5;
      cand = beta + t * step;
      cand_nll = neg_loglik(cand);
      ++halvings;
    }
    const double delta = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    nll = cand_nll;
    if (delta < 1e-9) {
      converged = true;
      break;
    }
  }
  fit.coef = beta;
  fit.converged = converged;
  const Vec eta = d * beta;
  for (int i = 0; i < n; ++i) {
    const double pr = 1.0 / (1.0 + std::exp(-eta[i]));
    if (pr < 1e-8 || pr > 1.0 - 1e-8) fit.separation = true;
  }
  return fit;
}

Vec LogisticFit::predict_prob(const Mat& x) const {
  const Vec eta = basis.design(x) * coef;
  Vec out(eta.size());
  for (int i = 0; i < eta.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-eta[i]));
  return out;
}

}  // namespace hte
