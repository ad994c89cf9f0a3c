#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hte/het_test.hpp"
#include "hte/rng.hpp"
#include "hte/simlab.hpp"
#include "oracles.hpp"

using namespace hte;

namespace {

Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

Mat col(std::initializer_list<double> vals) {
  Mat m(static_cast<int>(vals.size()), 1);
  int i = 0;
  for (double v : vals) m(i++, 0) = v;
  return m;
}

PseudoOutcomes make_pseudo(const Vec& psi) {
  PseudoOutcomes ps;
  ps.psi = psi;
  ps.psibar = psi.mean();
  return ps;
}

PolicyClass threshold_class() {
  PolicyClass c;
  c.variant = PolicyClass::Variant::ConstantThreshold;
  return c;
}

PseudoOutcomes random_pseudo(RandomStream& rs, int n, double scale = 2.0) {
  Vec psi(n);
  for (int i = 0; i < n; ++i) psi[i] = scale * rs.normal() + 0.4;
  return make_pseudo(psi);
}

Mat random_col(RandomStream& rs, int n) {
  Mat xs(n, 1);
  for (int i = 0; i < n; ++i) xs(i, 0) = 2.0 * rs.uniform() - 1.0;
  return xs;
}

}  // namespace

TEST_CASE("theta statistics: two-point example") {
  const PseudoOutcomes ps = make_pseudo(vec({-1.0, 2.0}));
  const Mat xs = col({0.0, 1.0});
  const QualThetaStats qs = qual_theta(ps, threshold_class(), xs, 0.0);
  CHECK(qs.sup_plus == doctest::Approx(1.0));
  CHECK(qs.inf_minus == doctest::Approx(-0.5));
  // the same f attains both extrema
  const Vec f = evaluate(qs.rule, xs);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 1.0);
}

TEST_CASE("constant psi gives exactly zero statistics with a flag") {
  const PseudoOutcomes ps = make_pseudo(Vec::Constant(5, 3.3));
  const Mat xs = col({0.0, 0.25, 0.5, 0.75, 1.0});
  const QuantThetaStats qs = quant_theta(ps, threshold_class(), xs);
  CHECK(qs.sup_abs == 0.0);
  CHECK(qs.degenerate);

  TestOptions opt;
  opt.M = 50;
  opt.seed = 5;
  const QuantTestReport r = quant_test(ps, threshold_class(), xs, opt);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK_FALSE(r.reject);
  CHECK(r.degenerate);
}

TEST_CASE("f == 1 member recovers the one-step ATE") {
  RandomStream rs(51, {0});
  const PseudoOutcomes ps = random_pseudo(rs, 17);
  const EifValues e =
      eif_values(ps, Vec::Ones(17), EstimandMode::DeltaMode, 0.0);
  CHECK(e.theta_plus == doctest::Approx(ps.psibar).epsilon(1e-12));
}

TEST_CASE("quant statistic is invariant to shifting psi") {
  RandomStream rs(52, {0});
  const int n = 30;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  PseudoOutcomes shifted = make_pseudo((ps.psi.array() + 11.5).matrix());

  TestOptions opt;
  opt.M = 80;
  opt.seed = 9;
  const QuantTestReport a = quant_test(ps, threshold_class(), xs, opt);
  const QuantTestReport b = quant_test(shifted, threshold_class(), xs, opt);
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-9));
  CHECK(std::abs(a.p_value - b.p_value) <= 2.0 / (opt.M + 1));
}

TEST_CASE("qualitative statistics are invariant to a joint psi/delta shift") {
  RandomStream rs(65, {0});
  const int n = 24;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const double shift = 4.25;
  const PseudoOutcomes moved = make_pseudo((ps.psi.array() + shift).matrix());
  const QualThetaStats a = qual_theta(ps, threshold_class(), xs, 0.7);
  const QualThetaStats b = qual_theta(moved, threshold_class(), xs, 0.7 + shift);
  CHECK(a.sup_plus == doctest::Approx(b.sup_plus).epsilon(1e-9));
  CHECK(a.inf_minus == doctest::Approx(b.inf_minus).epsilon(1e-9));
  CHECK(a.rule.describe() == b.rule.describe());
}

TEST_CASE("bootstrap draws are reproducible and substream-indexed") {
  RandomStream rs(53, {0});
  const int n = 12;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const Vec d1 = quant_multiplier_draws(ps, threshold_class(), xs, 40, 77);
  const Vec d2 = quant_multiplier_draws(ps, threshold_class(), xs, 40, 77);
  for (int m = 0; m < 40; ++m) CHECK(d1[m] == d2[m]);
  // a longer run shares the prefix (counter-based substreams)
  const Vec d3 = quant_multiplier_draws(ps, threshold_class(), xs, 80, 77);
  for (int m = 0; m < 40; ++m) CHECK(d3[m] == d1[m]);
  // threading does not change values
  const Vec d4 = quant_multiplier_draws(ps, threshold_class(), xs, 40, 77, 2);
  for (int m = 0; m < 40; ++m) CHECK(d4[m] == d1[m]);

  const Vec other = quant_multiplier_draws(ps, threshold_class(), xs, 40, 78);
  bool all_same = true;
  for (int m = 0; m < 40; ++m) all_same &= other[m] == d1[m];
  CHECK_FALSE(all_same);
}

TEST_CASE("single-observation draws vanish") {
  const PseudoOutcomes ps = make_pseudo(Vec::Constant(1, 4.2));
  const Mat xs = col({0.0});
  const Vec d = quant_multiplier_draws(ps, threshold_class(), xs, 10, 3);
  for (int m = 0; m < 10; ++m) CHECK(d[m] == 0.0);
  const QualDraws qd = qual_multiplier_draws(ps, threshold_class(), xs, 0.0, 10, 3);
  for (int m = 0; m < 10; ++m) {
    CHECK(qd.plus[m] == 0.0);
    CHECK(qd.minus[m] == 0.0);
  }
}

TEST_CASE("tau draws match a direct candidate-scan of the display") {
  RandomStream rs(54, {0});
  const int n = 9;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const PolicyClass cls = threshold_class();
  const int M = 25;
  const std::uint64_t seed = 1234;
  const Vec draws = quant_multiplier_draws(ps, cls, xs, M, seed);

  std::vector<Vec> fs;
  for (const auto& r : enumerate_candidates(cls, xs)) fs.push_back(evaluate(r, xs));
  const double sqn = std::sqrt(static_cast<double>(n));
  for (int m = 0; m < M; ++m) {
    const Vec xi = bootstrap_signs(n, seed, m);
    double best = 0.0;
    for (const Vec& f : fs) {
      const double fbar = f.mean();
      double theta_diff = 0.0;
      for (int i = 0; i < n; ++i)
        theta_diff += 2.0 * (ps.psi[i] - ps.psibar) * (f[i] - fbar);
      theta_diff /= n;
      double inner = 0.0;
      for (int i = 0; i < n; ++i)
        inner += xi[i] * ((ps.psi[i] - ps.psibar) * (2.0 * f[i] - 2.0 * fbar) -
                          theta_diff);
      best = std::max(best, std::abs(inner / sqn));
    }
    CHECK(draws[m] == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("qualitative draws match a direct candidate-scan of the display") {
  RandomStream rs(55, {0});
  const int n = 8;
  const double delta = 0.3;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const PolicyClass cls = threshold_class();
  const int M = 25;
  const std::uint64_t seed = 4321;
  const QualDraws draws = qual_multiplier_draws(ps, cls, xs, delta, M, seed);

  std::vector<Vec> fs;
  for (const auto& r : enumerate_candidates(cls, xs)) fs.push_back(evaluate(r, xs));
  const double sqn = std::sqrt(static_cast<double>(n));
  for (int m = 0; m < M; ++m) {
    const Vec xi = bootstrap_signs(n, seed, m);
    double best_plus = -1e300, best_minus = 1e300;
    for (const Vec& f : fs) {
      double tp = 0.0, tm = 0.0;
      for (int i = 0; i < n; ++i) {
        tp += (ps.psi[i] - delta) * f[i];
        tm += (ps.psi[i] - delta) * (1.0 - f[i]);
      }
      tp /= n;
      tm /= n;
      double ip = 0.0, im = 0.0;
      for (int i = 0; i < n; ++i) {
        ip += xi[i] * ((ps.psi[i] - delta) * f[i] - tp);
        im += xi[i] * ((ps.psi[i] - delta) * (1.0 - f[i]) - tm);
      }
      best_plus = std::max(best_plus, ip / sqn);
      best_minus = std::min(best_minus, im / sqn);
    }
    CHECK(draws.plus[m] == doctest::Approx(best_plus).epsilon(1e-9));
    CHECK(draws.minus[m] == doctest::Approx(best_minus).epsilon(1e-9));
  }
}

TEST_CASE("pre-sup summand is conditionally centered over draws") {
  RandomStream rs(56, {0});
  const int n = 100;
  const PseudoOutcomes ps = random_pseudo(rs, n, 1.0);
  const int M = 4000;
  const double sqn = std::sqrt(static_cast<double>(n));
  // fixed member f == 1 in delta mode: inner value is n^-1/2 sum xi_i c_i
  double avg = 0.0;
  for (int m = 0; m < M; ++m) {
    const Vec xi = bootstrap_signs(n, 2024, m);
    double inner = 0.0;
    for (int i = 0; i < n; ++i) inner += xi[i] * (ps.psi[i] - ps.psibar);
    avg += inner / sqn;
  }
  avg /= M;
  const double sd_psi = std::sqrt(
      (ps.psi.array() - ps.psibar).square().sum() / n);
  CHECK(std::abs(avg) <= 3.5 * sd_psi / std::sqrt(static_cast<double>(M)));
}

TEST_CASE("quant test contract and determinism") {
  RandomStream rs(57, {0});
  const int n = 40;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  TestOptions opt;
  opt.M = 199;
  opt.seed = 11;
  const QuantTestReport a = quant_test(ps, threshold_class(), xs, opt);
  CHECK(a.p_value >= 0.0);
  CHECK(a.p_value <= 1.0);
  CHECK(a.reject == (a.statistic > a.t_alpha));
  CHECK(a.t_alpha == empirical_quantile(a.draws, 1.0 - opt.alpha));

  const QuantTestReport b = quant_test(ps, threshold_class(), xs, opt);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);
  for (int m = 0; m < opt.M; ++m) CHECK(a.draws[m] == b.draws[m]);
}

TEST_CASE("critical values are monotone in alpha") {
  RandomStream rs(58, {0});
  const PseudoOutcomes ps = random_pseudo(rs, 25);
  const Mat xs = random_col(rs, 25);
  const Vec draws = quant_multiplier_draws(ps, threshold_class(), xs, 500, 2);
  double last = -1e300;
  for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
    const double t = empirical_quantile(draws, 1.0 - alpha);
    CHECK(t >= last);
    last = t;
  }
}

TEST_CASE("qualitative test: dominated delta never rejects") {
  RandomStream rs(59, {0});
  const int n = 30;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const double delta = ps.psi.cwiseAbs().maxCoeff() + 1.0;
  TestOptions opt;
  opt.M = 120;
  opt.seed = 6;
  const QualTestReport r = qual_test(ps, threshold_class(), xs, delta, opt);
  CHECK(r.stat_plus == doctest::Approx(0.0));
  CHECK_FALSE(r.reject);
  CHECK(r.p_combined == doctest::Approx(std::max(r.p_plus, r.p_minus)));
}

TEST_CASE("qualitative decision implies both marginal decisions") {
  RandomStream rs(60, {0});
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 10 + static_cast<int>(rs.uniform_int(30));
    const PseudoOutcomes ps = random_pseudo(rs, n);
    const Mat xs = random_col(rs, n);
    TestOptions opt;
    opt.M = 60;
    opt.seed = rep;
    const QualTestReport r = qual_test(ps, threshold_class(), xs, 0.0, opt);
    if (r.reject) {
      CHECK(r.stat_plus > r.t_plus);
      CHECK(r.stat_minus < r.t_minus);
    }
    CHECK(r.p_plus >= 0.0);
    CHECK(r.p_minus >= 0.0);
    CHECK(r.p_combined <= 1.0);
    CHECK(r.reject == (r.stat_plus > r.t_plus && r.stat_minus < r.t_minus));
  }
}

TEST_CASE("type I error under an exchangeable null") {
  // psi exchangeable around its mean: bootstrap calibration should keep the
  // rejection rate at or below alpha up to Monte Carlo error
  const double alpha = 0.05;
  const int R = 250, n = 60;
  TestOptions opt;
  opt.alpha = alpha;
  opt.M = 199;
  int rejections = 0;
  for (int r = 0; r < R; ++r) {
    RandomStream rs(777, {static_cast<std::uint64_t>(r)});
    const PseudoOutcomes ps = random_pseudo(rs, n);
    const Mat xs = random_col(rs, n);
    opt.seed = 5000 + r;
    rejections += quant_test(ps, threshold_class(), xs, opt).reject;
  }
  const double rate = static_cast<double>(rejections) / R;
  CHECK(rate <= alpha + 3.0 * std::sqrt(alpha * (1 - alpha) / R));
}

TEST_CASE("value diagnostics") {
  const PseudoOutcomes ps = make_pseudo(vec({-1.0, 2.0}));
  // f == 1: static rule, gain cannot be positive
  const ValueDiagnostics d1 = value_diagnostics(ps, Vec::Ones(2));
  CHECK(d1.theta_plus0 == doctest::Approx(0.5));
  CHECK(d1.theta_minus0 == doctest::Approx(0.0));
  CHECK(d1.min_gain == doctest::Approx(std::min(0.5, -0.0)));
  CHECK(d1.min_gain <= 0.0 + 1e-15);
  // f == 0: the other static rule
  const ValueDiagnostics d0 = value_diagnostics(ps, Vec::Zero(2));
  CHECK(d0.theta_plus0 == doctest::Approx(0.0));
  CHECK(d0.min_gain <= 1e-15);
  // the two-point extremal rule from the theta example
  const ValueDiagnostics dstar = value_diagnostics(ps, vec({0.0, 1.0}));
  CHECK(dstar.theta_plus0 == doctest::Approx(1.0));
  CHECK(dstar.theta_minus0 == doctest::Approx(-0.5));
  CHECK(dstar.min_gain == doctest::Approx(0.5));
}

TEST_CASE("variance-weighted statistics match an independent scan") {
  RandomStream rs(61, {0});
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 3 + static_cast<int>(rs.uniform_int(10));
    const PseudoOutcomes ps = random_pseudo(rs, n);
    const Mat xs = random_col(rs, n);
    const PolicyClass cls = threshold_class();

    const WeightedStats ws = variance_weighted_stats(
        ps, cls, xs, EstimandMode::TauMode, 0.0, 1e-12);
    double best = -1.0;
    for (const auto& r : enumerate_candidates(cls, xs)) {
      const Vec f = evaluate(r, xs);
      const double fbar = f.mean();
      Vec comb(n);
      double num = 0.0;
      for (int i = 0; i < n; ++i)
        num += 2.0 * (ps.psi[i] - ps.psibar) * (f[i] - fbar) / n;
      for (int i = 0; i < n; ++i)
        comb[i] = 2.0 * (ps.psi[i] - ps.psibar) * (f[i] - fbar) - num;
      const double v = oracle::variance_two_pass(comb);
      if (v >= 1e-12) best = std::max(best, std::abs(num) / std::sqrt(v));
    }
    CHECK(ws.sup_weighted == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("variance weighting: hand instance with two candidate thresholds") {
  // n = 3 at x = (0, 1, 2), psi = (1, 2, 4), delta = 0
  const PseudoOutcomes ps = make_pseudo(vec({1.0, 2.0, 4.0}));
  const Mat xs = col({0.0, 1.0, 2.0});
  const WeightedStats ws = variance_weighted_stats(
      ps, threshold_class(), xs, EstimandMode::DeltaMode, 0.0, 1e-12);
  // by direct computation over every threshold labeling, the plus-side
  // maximizer is f = (1,1,1): theta+ = 7/3, phi = psi - 7/3,
  // V = mean(phi^2) = (16/9 + 1/9 + 25/9)/3 = 14/9
  const double expect = (7.0 / 3.0) / std::sqrt(14.0 / 9.0);
  CHECK(ws.sup_plus == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("variance weighting is invariant to rescaling the data") {
  RandomStream rs(62, {0});
  const int n = 14;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  const PseudoOutcomes scaled = make_pseudo((3.0 * ps.psi.array()).matrix());
  const WeightedStats a = variance_weighted_stats(
      ps, threshold_class(), xs, EstimandMode::TauMode, 0.0, 1e-12);
  const WeightedStats b = variance_weighted_stats(
      scaled, threshold_class(), xs, EstimandMode::TauMode, 0.0, 1e-12);
  CHECK(a.sup_weighted == doctest::Approx(b.sup_weighted).epsilon(1e-9));
  CHECK(a.rule.describe() == b.rule.describe());
}

TEST_CASE("variance-weighted bootstrap keeps the p-value contract") {
  RandomStream rs(63, {0});
  const int n = 20;
  const PseudoOutcomes ps = random_pseudo(rs, n);
  const Mat xs = random_col(rs, n);
  TestOptions opt;
  opt.M = 99;
  opt.seed = 17;
  opt.variance_weighted = true;
  const QuantTestReport a = quant_test(ps, threshold_class(), xs, opt);
  const QuantTestReport b = quant_test(ps, threshold_class(), xs, opt);
  CHECK(a.p_value >= 0.0);
  CHECK(a.p_value <= 1.0);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);
  CHECK(a.variance_weighted);

  const QualTestReport q = qual_test(ps, threshold_class(), xs, 0.0, opt);
  CHECK(q.p_combined >= 0.0);
  CHECK(q.p_combined <= 1.0);
}

TEST_CASE("degenerate variance weighting throws") {
  const PseudoOutcomes ps = make_pseudo(Vec::Constant(4, 2.0));
  const Mat xs = col({0.0, 1.0, 2.0, 3.0});
  CHECK_THROWS_AS(variance_weighted_stats(ps, threshold_class(), xs,
                                          EstimandMode::TauMode, 0.0, 1e-12),
                  std::runtime_error);
}

TEST_CASE("reports serialize to json with the documented fields") {
  RandomStream rs(64, {0});
  const PseudoOutcomes ps = random_pseudo(rs, 15);
  const Mat xs = random_col(rs, 15);
  TestOptions opt;
  opt.M = 49;
  opt.seed = 2;
  const PolicyClass cls = threshold_class();
  const json jq = quant_test(ps, cls, xs, opt).to_json(cls);
  for (const char* key : {"kind", "statistic", "critical_value", "p_value",
                          "reject", "alpha", "bootstrap_draws", "seed", "n",
                          "class", "rule", "diagnostics", "draw_quantiles"})
    CHECK(jq.contains(key));
  CHECK(jq["kind"] == "quant");

  const json jl = qual_test(ps, cls, xs, 0.0, opt).to_json(cls);
  for (const char* key :
       {"kind", "statistic_plus", "statistic_minus", "critical_value_plus",
        "critical_value_minus", "p_value_plus", "p_value_minus", "p_value",
        "reject", "delta", "rule_plus", "rule_minus"})
    CHECK(jl.contains(key));
  CHECK(jl["kind"] == "qual");
}
