#include "hte/nuisance.hpp"

#include <algorithm>
#include <cmath>

namespace hte {

std::string OutcomeSpec::tag() const {
  switch (kind) {
    case Kind::Linear: return "ols-linear";
    case Kind::Polynomial: return "ols-polynomial(" + std::to_string(degree) + ")";
    case Kind::Spline: return "ols-natural-spline(" + std::to_string(knots) + ")";
  }
  return "";
}

std::string PropensitySpec::tag() const {
  switch (kind) {
    case Kind::LogisticLinear: return "logistic-linear";
    case Kind::LogisticPolynomial:
      return "logistic-polynomial(" + std::to_string(degree) + ")";
    case Kind::Known: return "known";
  }
  return "";
}

namespace {

Basis outcome_basis(const Sample& sample, const OutcomeSpec& spec) {
  switch (spec.kind) {
    case OutcomeSpec::Kind::Linear: return Basis::polynomial(1);
    case OutcomeSpec::Kind::Polynomial: return Basis::polynomial(spec.degree);
    case OutcomeSpec::Kind::Spline:
      return Basis::natural_spline(sample.x, spec.knots);
  }
  return Basis::polynomial(1);
}

Mat rows_of(const Mat& x, const std::vector<int>& idx) {
  Mat out(static_cast<int>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = x.row(idx[i]);
  return out;
}

Vec elems_of(const Vec& v, const std::vector<int>& idx) {
  Vec out(static_cast<int>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

OutcomeFit fit_outcome_on(const Sample& sample, const std::vector<int>& rows,
                          const OutcomeSpec& spec) {
  std::vector<int> idx0, idx1;
  for (int i : rows) (sample.a[i] ? idx1 : idx0).push_back(i);
  if (idx0.empty() || idx1.empty())
    throw ValidationError("outcome fit requires both treatment arms");
  OutcomeFit fit;
  fit.basis = outcome_basis(sample, spec);
  fit.arm0 = fit_least_squares(rows_of(sample.x, idx0), elems_of(sample.y, idx0),
                               fit.basis);
  fit.arm1 = fit_least_squares(rows_of(sample.x, idx1), elems_of(sample.y, idx1),
                               fit.basis);
  if (fit.arm0.ridged || fit.arm1.ridged)
    fit.warnings.push_back(
        "rank-deficient outcome design; ridge fallback (1e-8) applied");
  return fit;
}

}  // namespace

Vec OutcomeFit::evaluate(int arm, const Mat& x) const {
  return arm == 1 ? arm1.predict(x) : arm0.predict(x);
}

Vec PropensityFit::evaluate1(const Mat& x) const {
  const int n = static_cast<int>(x.rows());
  if (spec.kind == PropensitySpec::Kind::Known) {
    Vec out(n);
    if (spec.known_fn) {
      for (int i = 0; i < n; ++i) out[i] = spec.known_fn(x.row(i));
    } else {
      out.setConstant(spec.known_value);
    }
    return out;
  }
  return model->predict_prob(x);
}

OutcomeFit fit_outcome(const Sample& sample, const OutcomeSpec& spec) {
  std::vector<int> all(sample.n());
  for (int i = 0; i < sample.n(); ++i) all[i] = i;
  return fit_outcome_on(sample, all, spec);
}

PropensityFit fit_propensity(const Sample& sample, const PropensitySpec& spec) {
  PropensityFit fit;
  fit.spec = spec;
  if (spec.kind == PropensitySpec::Kind::Known) {
    if (!spec.known_fn &&
        !(spec.known_value > 0.0 && spec.known_value < 1.0))
      throw ValidationError("known propensity must lie in (0,1)");
    return fit;
  }
  const int degree =
      spec.kind == PropensitySpec::Kind::LogisticLinear ? 1 : spec.degree;
  fit.model = fit_logistic(sample.x, sample.a, Basis::polynomial(degree));
  if (fit.model->separation)
    fit.warnings.push_back(
        "possible separation in propensity model; outputs are truncated");
  if (!fit.model->converged)
    fit.warnings.push_back("propensity model did not fully converge");
  return fit;
}

NuisanceFit fit_nuisance(const Sample& sample, const OutcomeSpec& ospec,
                         const PropensitySpec& pspec, double epsilon) {
  sample.validate();
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw ValidationError("truncation level must lie in (0, 0.5)");
  NuisanceFit nf;
  nf.epsilon = epsilon;
  nf.outcome_method = ospec.tag();
  nf.propensity_method = pspec.tag();

  auto ofit = std::make_shared<OutcomeFit>(fit_outcome(sample, ospec));
  auto pfit = std::make_shared<PropensityFit>(fit_propensity(sample, pspec));
  nf.mu0 = ofit->evaluate(0, sample.x);
  nf.mu1 = ofit->evaluate(1, sample.x);
  nf.pi1 = pfit->evaluate1(sample.x);
  for (int i = 0; i < nf.pi1.size(); ++i)
    nf.pi1[i] = std::clamp(nf.pi1[i], epsilon, 1.0 - epsilon);
  for (const auto& w : ofit->warnings) nf.warnings.push_back(w);
  for (const auto& w : pfit->warnings) nf.warnings.push_back(w);
  nf.outcome_model = ofit;
  nf.propensity_model = pfit;
  return nf;
}

NuisanceFit crossfit(const Sample& sample, const OutcomeSpec& ospec,
                     const PropensitySpec& pspec, int k, std::uint64_t seed,
                     double epsilon) {
  sample.validate();
  if (k < 2) throw ValidationError("cross-fitting needs at least 2 folds");
  const auto folds = split_folds(sample.n(), k, seed);
  for (const auto& [train, eval] : folds) {
    int n1 = 0;
    for (int i : train) n1 += sample.a[i];
    if (n1 == 0 || n1 == static_cast<int>(train.size()))
      throw ValidationError(
          "a cross-fitting fold leaves training data with a single treatment "
          "arm; use fewer folds");
  }

  NuisanceFit nf;
  nf.epsilon = epsilon;
  nf.crossfitted = true;
  nf.outcome_method = ospec.tag() + " (cross-fitted)";
  nf.propensity_method = pspec.tag() + " (cross-fitted)";
  nf.mu0.resize(sample.n());
  nf.mu1.resize(sample.n());
  nf.pi1.resize(sample.n());

  for (const auto& [train, eval] : folds) {
    Sample sub;
    sub.x = rows_of(sample.x, train);
    sub.y = elems_of(sample.y, train);
    sub.a.resize(static_cast<int>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) sub.a[i] = sample.a[train[i]];
    sub.s = sample.s;

    const OutcomeFit ofit = fit_outcome(sub, ospec);
    const PropensityFit pfit = fit_propensity(sub, pspec);

    const Mat xe = rows_of(sample.x, eval);
    const Vec m0 = ofit.evaluate(0, xe), m1 = ofit.evaluate(1, xe);
    const Vec p1 = pfit.evaluate1(xe);
    for (std::size_t i = 0; i < eval.size(); ++i) {
      nf.mu0[eval[i]] = m0[static_cast<int>(i)];
      nf.mu1[eval[i]] = m1[static_cast<int>(i)];
      nf.pi1[eval[i]] =
          std::clamp(p1[static_cast<int>(i)], epsilon, 1.0 - epsilon);
    }
    for (const auto& w : ofit.warnings) nf.warnings.push_back(w);
    for (const auto& w : pfit.warnings) nf.warnings.push_back(w);
  }
  return nf;
}

}  // namespace hte
