#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hte/comparators.hpp"
#include "hte/rng.hpp"

using namespace hte;

namespace {

Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

PseudoOutcomes make_pseudo(const Vec& psi) {
  PseudoOutcomes ps;
  ps.psi = psi;
  ps.psibar = psi.mean();
  return ps;
}

SubgroupEstimates manual_est(const Vec& d, const Vec& s, int count = 10) {
  SubgroupEstimates est;
  est.d = d;
  est.s = s;
  est.counts = Eigen::VectorXi::Constant(static_cast<int>(d.size()), count);
  est.degenerate.assign(d.size(), false);
  est.n = count * static_cast<int>(d.size());
  est.ate = d.mean();
  est.ate_se = 1.0;
  return est;
}

}  // namespace

TEST_CASE("subgroup aipw: hand computation") {
  const PseudoOutcomes ps = make_pseudo(vec({1.0, 1.0, 3.0, 3.0}));
  const Vec xs = vec({-1.0, -1.0, 1.0, 1.0});
  const SubgroupEstimates est = subgroup_aipw(ps, xs, 2);
  REQUIRE(est.k() == 2);
  CHECK(est.d[0] == doctest::Approx(1.0));
  CHECK(est.d[1] == doctest::Approx(3.0));
  CHECK(est.s[0] == doctest::Approx(0.0));
  CHECK(est.s[1] == doctest::Approx(0.0));
  CHECK(est.degenerate[0]);
  CHECK(est.degenerate[1]);
  CHECK(est.counts[0] == 2);
}

TEST_CASE("subgroup aipw: constant psi and the weighted-mean identity") {
  RandomStream rs(71, {0});
  const int n = 123;
  Vec psi(n), xs(n);
  for (int i = 0; i < n; ++i) {
    psi[i] = rs.normal();
    xs[i] = 2.0 * rs.uniform() - 1.0;
  }
  const PseudoOutcomes ps = make_pseudo(psi);
  const SubgroupEstimates est = subgroup_aipw(ps, xs, 7);
  double weighted = 0.0;
  int total = 0;
  for (int k = 0; k < est.k(); ++k) {
    weighted += est.counts[k] * est.d[k];
    total += est.counts[k];
  }
  CHECK(total == n);
  CHECK(weighted / n == doctest::Approx(ps.psibar).epsilon(1e-12));

  const PseudoOutcomes flat = make_pseudo(Vec::Constant(n, 2.5));
  const SubgroupEstimates est2 = subgroup_aipw(flat, xs, 5);
  for (int k = 0; k < est2.k(); ++k) {
    CHECK(est2.d[k] == doctest::Approx(2.5));
    CHECK(est2.s[k] == doctest::Approx(0.0));
  }
}

TEST_CASE("subgroup aipw rejects unusable binnings") {
  const PseudoOutcomes ps = make_pseudo(vec({1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(subgroup_aipw(ps, vec({1.0, 2.0, 3.0}), 1), ValidationError);
  // all mass in one bin
  CHECK_THROWS_AS(subgroup_aipw(ps, vec({1.0, 1.0, 1.0}), 4), ValidationError);
}

TEST_CASE("unstructured test: exact null statistic") {
  const SubgroupEstimates est =
      manual_est(vec({2.0, 2.0, 2.0}), vec({1.0, 1.0, 1.0}));
  const ComparatorReport r = unstructured_quant_test(est, 0.05, 400, 5);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value > 0.9);
  CHECK_FALSE(r.reject);
}

TEST_CASE("unstructured statistic is invariant to permuting bins") {
  const SubgroupEstimates a =
      manual_est(vec({1.0, -2.0, 0.5, 3.0}), vec({1.0, 0.5, 2.0, 1.0}));
  const SubgroupEstimates b =
      manual_est(vec({3.0, 0.5, -2.0, 1.0}), vec({1.0, 2.0, 0.5, 1.0}));
  const ComparatorReport ra = unstructured_quant_test(a, 0.05, 100, 5);
  const ComparatorReport rb = unstructured_quant_test(b, 0.05, 100, 5);
  CHECK(ra.statistic == doctest::Approx(rb.statistic));
}

TEST_CASE("gail-simon: one-sided structure and hand case") {
  const SubgroupEstimates same_sign =
      manual_est(vec({1.0, 2.0, 0.5}), vec({1.0, 1.0, 1.0}));
  const ComparatorReport r0 = gail_simon_test(same_sign, 0.05, 300, 7);
  CHECK(r0.statistic == doctest::Approx(0.0));
  CHECK_FALSE(r0.reject);

  const SubgroupEstimates strong =
      manual_est(vec({3.0, -3.0}), vec({1.0, 1.0}));
  const ComparatorReport r1 = gail_simon_test(strong, 0.05, 4000, 7);
  CHECK(r1.statistic == doctest::Approx(9.0));
  CHECK(r1.p_value < 0.01);
  CHECK(r1.reject);
}

TEST_CASE("gail-simon and range depend only on standardized effects") {
  const SubgroupEstimates a =
      manual_est(vec({1.0, -2.0, 0.5}), vec({0.5, 1.0, 0.25}));
  SubgroupEstimates b = a;
  b.d *= 3.0;
  b.s *= 3.0;
  const ComparatorReport ga = gail_simon_test(a, 0.05, 200, 3);
  const ComparatorReport gb = gail_simon_test(b, 0.05, 200, 3);
  CHECK(ga.statistic == doctest::Approx(gb.statistic).epsilon(1e-12));
  CHECK(ga.p_value == gb.p_value);
  const ComparatorReport rga = range_test(a, 0.05, 200, 3);
  const ComparatorReport rgb = range_test(b, 0.05, 200, 3);
  CHECK(rga.statistic == doctest::Approx(rgb.statistic).epsilon(1e-12));
  CHECK(rga.reject == rgb.reject);
}

TEST_CASE("range test: hand cases") {
  const SubgroupEstimates pos =
      manual_est(vec({0.5, 2.0, 1.0}), vec({1.0, 1.0, 1.0}));
  const ComparatorReport r0 = range_test(pos, 0.05, 500, 9);
  CHECK_FALSE(r0.reject);  // all standardized effects positive

  const SubgroupEstimates strong =
      manual_est(vec({4.0, -4.0}), vec({1.0, 1.0}));
  const ComparatorReport r1 = range_test(strong, 0.05, 4000, 9);
  // K=2 calibrated cutoff is ~1.0 at alpha=.05; 4 standard errors clears it
  CHECK(r1.statistic == doctest::Approx(4.0));
  CHECK(r1.critical_value > 0.5);
  CHECK(r1.critical_value < 2.0);
  CHECK(r1.reject);
}

TEST_CASE("comparators are calibrated under their least-favorable nulls") {
  // rejection rate within 3 MCSE of alpha (quick version; the acceptance
  // suite runs the full R=2000 check). The qualitative comparators'
  // least-favorable configuration has one divergent effect with the rest
  // null; the unstructured test's null is the centered model itself.
  const double alpha = 0.05;
  const int R = 400, K = 8, M = 400;
  int rej_gs = 0, rej_range = 0, rej_unstr = 0;
  for (int r = 0; r < R; ++r) {
    RandomStream rs(314, {static_cast<std::uint64_t>(r)});
    Vec d(K);
    for (int k = 0; k < K; ++k) d[k] = rs.normal();
    // large per-bin counts: the t reference coincides with the generator
    rej_unstr += unstructured_quant_test(manual_est(d, Vec::Ones(K), 4000),
                                         alpha, M, 3000 + r)
                     .reject;
    d[K - 1] = 1e4;  // boundary of the composite null
    const SubgroupEstimates est = manual_est(d, Vec::Ones(K), 4000);
    rej_gs += gail_simon_test(est, alpha, M, 1000 + r).reject;
    rej_range += range_test(est, alpha, M, 2000 + r).reject;
  }
  const double band = 3.0 * std::sqrt(alpha * (1 - alpha) / R);
  CHECK(std::abs(static_cast<double>(rej_unstr) / R - alpha) <= band);
  CHECK(std::abs(static_cast<double>(rej_gs) / R - alpha) <= band);
  CHECK(std::abs(static_cast<double>(rej_range) / R - alpha) <= band);
}

TEST_CASE("comparator reports serialize") {
  const SubgroupEstimates est =
      manual_est(vec({1.0, -1.0}), vec({1.0, 1.0}));
  const auto j = gail_simon_test(est, 0.05, 50, 1).to_json();
  for (const char* key : {"kind", "comparator", "statistic", "p_value",
                          "reject", "alpha", "bins_used"})
    CHECK(j.contains(key));
}
