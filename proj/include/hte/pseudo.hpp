#pragma once

#include "hte/data.hpp"
#include "hte/nuisance.hpp"

namespace hte {

// AIPW pseudo-outcomes: psi_i has conditional mean equal to the CATE, and
// psibar is the one-step ATE estimate. Computed once per analysis; every
// statistic and bootstrap draw reuses it.
struct PseudoOutcomes {
  Vec psi;
  double psibar = 0.0;

  int n() const { return static_cast<int>(psi.size()); }
};

PseudoOutcomes pseudo_outcomes(const Sample& sample, const NuisanceFit& fit);

enum class EstimandMode { DeltaMode, TauMode };

// Estimated influence-function evaluations for the weighted functionals at a
// fixed f. Centered: each column averages to zero by construction.
struct EifValues {
  EstimandMode mode;
  double delta = 0.0;
  Vec phi_plus, phi_minus;
  double theta_plus = 0.0, theta_minus = 0.0;

  int n() const { return static_cast<int>(phi_plus.size()); }
};

EifValues eif_values(const PseudoOutcomes& pseudo, const Vec& f_values,
                     EstimandMode mode, double delta = 0.0);

struct EifVariance {
  double v_plus = 0.0;
  double v_minus = 0.0;
  double v_combined = 0.0;  // tau mode: variance of phi_plus - phi_minus
  bool degenerate = false;  // below the 1e-12 floor
};

EifVariance eif_variance(const EifValues& eif, double floor = 1e-12);

}  // namespace hte
