#include "hte/pseudo.hpp"

namespace hte {

PseudoOutcomes pseudo_outcomes(const Sample& sample, const NuisanceFit& fit) {
  const int n = sample.n();
  PseudoOutcomes out;
  out.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    const int a = sample.a[i];
    const double resid = sample.y[i] - fit.mu(a, i);
    out.psi[i] =
        fit.mu1[i] - fit.mu0[i] + (2.0 * a - 1.0) * resid / fit.pi(a, i);
  }
  out.psibar = out.psi.mean();
  return out;
}

EifValues eif_values(const PseudoOutcomes& pseudo, const Vec& f_values,
                     EstimandMode mode, double delta) {
  const int n = pseudo.n();
  if (f_values.size() != n)
    throw ValidationError("f values and pseudo-outcomes differ in length");
  for (int i = 0; i < n; ++i)
    if (!(f_values[i] >= 0.0 && f_values[i] <= 1.0))
      throw ValidationError("f value outside [0,1]");

  EifValues out;
  out.mode = mode;
  out.delta = delta;
  out.phi_plus.resize(n);
  out.phi_minus.resize(n);

  if (mode == EstimandMode::DeltaMode) {
    double tp = 0.0, tm = 0.0;
    for (int i = 0; i < n; ++i) {
      tp += (pseudo.psi[i] - delta) * f_values[i];
      tm += (pseudo.psi[i] - delta) * (1.0 - f_values[i]);
    }
    tp /= n;
    tm /= n;
    out.theta_plus = tp;
    out.theta_minus = tm;
    for (int i = 0; i < n; ++i) {
      out.phi_plus[i] = (pseudo.psi[i] - delta) * f_values[i] - tp;
      out.phi_minus[i] = (pseudo.psi[i] - delta) * (1.0 - f_values[i]) - tm;
    }
  } else {
    const double fbar = f_values.mean();
    double tp = 0.0;
    for (int i = 0; i < n; ++i)
      tp += (pseudo.psi[i] - pseudo.psibar) * (f_values[i] - fbar);
    tp /= n;
    out.theta_plus = tp;
    out.theta_minus = -tp;  // centered products differ only in sign
    for (int i = 0; i < n; ++i) {
      const double c = pseudo.psi[i] - pseudo.psibar;
      out.phi_plus[i] = c * (f_values[i] - fbar) - tp;
      out.phi_minus[i] = c * ((1.0 - f_values[i]) - (1.0 - fbar)) + tp;
    }
  }
  return out;
}

EifVariance eif_variance(const EifValues& eif, double floor) {
  const int n = eif.n();
  if (n < 2) throw ValidationError("variance needs at least 2 rows");
  EifVariance v;
  v.v_plus = eif.phi_plus.squaredNorm() / n;
  v.v_minus = eif.phi_minus.squaredNorm() / n;
  v.v_combined = (eif.phi_plus - eif.phi_minus).squaredNorm() / n;
  const double checked =
      eif.mode == EstimandMode::TauMode ? v.v_combined
                                        : std::min(v.v_plus, v.v_minus);
  v.degenerate = checked < floor;
  return v;
}

}  // namespace hte
