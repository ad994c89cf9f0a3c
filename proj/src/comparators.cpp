#include "hte/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hte/rng.hpp"

namespace hte {

namespace {

constexpr double kSeFloor = 1e-8;
constexpr std::uint64_t kCompTag = 0xC03BA7ULL;

Vec standardized(const SubgroupEstimates& est) {
  Vec z(est.k());
  for (int k = 0; k < est.k(); ++k)
    z[k] = est.d[k] / std::max(est.s[k], kSeFloor);
  return z;
}

}  // namespace

SubgroupEstimates subgroup_aipw(const PseudoOutcomes& pseudo, const Vec& xs_col,
                                int bins) {
  if (bins < 2) throw ValidationError("need at least 2 bins");
  const int n = pseudo.n();
  if (xs_col.size() != n)
    throw ValidationError("modifier column and pseudo-outcomes differ in length");

  const double lo = xs_col.minCoeff(), hi = xs_col.maxCoeff();
  const double width = (hi - lo) / bins;
  std::vector<std::vector<double>> groups(bins);
  for (int i = 0; i < n; ++i) {
    int k = width > 0.0 ? static_cast<int>(std::floor((xs_col[i] - lo) / width))
                        : 0;
    k = std::clamp(k, 0, bins - 1);
    groups[k].push_back(pseudo.psi[i]);
  }

  std::vector<double> d, s;
  std::vector<int> counts;
  std::vector<bool> degen;
  int dropped = 0;
  for (int k = 0; k < bins; ++k) {
    if (groups[k].empty()) {
      ++dropped;
      continue;
    }
    const int nk = static_cast<int>(groups[k].size());
    double mean = 0.0;
    for (double v : groups[k]) mean += v;
    mean /= nk;
    double var = 0.0;
    for (double v : groups[k]) var += (v - mean) * (v - mean);
    var = nk > 1 ? var / (nk - 1) : 0.0;
    d.push_back(mean);
    s.push_back(std::sqrt(var / nk));
    counts.push_back(nk);
    degen.push_back(var <= 0.0 || nk < 2);
  }
  if (static_cast<int>(d.size()) < 2)
    throw ValidationError("fewer than 2 non-empty bins");

  SubgroupEstimates est;
  const int K = static_cast<int>(d.size());
  est.d = Eigen::Map<Vec>(d.data(), K);
  est.s = Eigen::Map<Vec>(s.data(), K);
  est.counts = Eigen::Map<Eigen::VectorXi>(counts.data(), K);
  est.degenerate = std::move(degen);
  est.dropped_bins = dropped;
  est.n = n;
  est.ate = pseudo.psibar;
  const double var_psi =
      (pseudo.psi.array() - pseudo.psibar).square().sum() / std::max(1, n - 1);
  est.ate_se = std::sqrt(var_psi / n);
  return est;
}

ComparatorReport unstructured_quant_test(const SubgroupEstimates& est,
                                         double alpha, int M,
                                         std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0,1)");
  if (M < 1) throw ValidationError("Monte Carlo draw count must be >= 1");
  ComparatorReport r;
  r.name = "unstructured";
  r.alpha = alpha;
  r.M = M;
  r.seed = seed;
  r.bins_used = est.k();
  r.dropped_bins = est.dropped_bins;
  const int K = est.k();

  Vec wgt(K);
  for (int k = 0; k < K; ++k)
    wgt[k] = static_cast<double>(est.counts[k]) / est.n;

  double stat = 0.0;
  for (int k = 0; k < K; ++k) stat += std::abs(est.d[k] - est.ate);
  r.statistic = stat;

  bool any_degen = false;
  for (bool b : est.degenerate) any_degen |= b;
  if (any_degen)
    r.warnings.push_back("zero-variance bins floored at 1e-8 standard error");

  // d_k independent N(0, s_k^2), centered by the count-weighted mean: this
  // draws exactly from the estimated covariance of (d - ATE)
  Vec stats(M);
  for (int m = 0; m < M; ++m) {
    RandomStream rs(seed, {kCompTag, 1, static_cast<std::uint64_t>(m)});
    Vec dk(K);
    for (int k = 0; k < K; ++k)
      dk[k] = std::max(est.s[k], kSeFloor) * rs.normal();
    const double atem = wgt.dot(dk);
    double st = 0.0;
    for (int k = 0; k < K; ++k) st += std::abs(dk[k] - atem);
    stats[m] = st;
  }
  int count = 0;
  for (int m = 0; m < M; ++m)
    if (stats[m] >= stat) ++count;
  r.p_value = (1.0 + count) / (M + 1.0);
  std::sort(stats.data(), stats.data() + M);
  const int q = std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * M)), 1, M);
  r.critical_value = stats[q - 1];
  r.reject = r.p_value <= alpha;
  return r;
}

ComparatorReport gail_simon_test(const SubgroupEstimates& est, double alpha,
                                 int M, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0,1)");
  if (M < 1) throw ValidationError("Monte Carlo draw count must be >= 1");
  ComparatorReport r;
  r.name = "gail-simon";
  r.alpha = alpha;
  r.M = M;
  r.seed = seed;
  r.bins_used = est.k();
  r.dropped_bins = est.dropped_bins;
  const int K = est.k();

  auto gs_stat = [K](const Vec& z) {
    double qp = 0.0, qm = 0.0;
    for (int k = 0; k < K; ++k) {
      if (z[k] > 0.0) qp += z[k] * z[k];
      if (z[k] < 0.0) qm += z[k] * z[k];
    }
    return std::min(qp, qm);
  };

  r.statistic = gs_stat(standardized(est));

  // Least-favorable configuration of the composite null: one effect
  // divergent (its one-sided sum rejects automatically) and the remaining
  // K-1 effects null, so min(Q+, Q-) reduces to the opposite one-sided sum
  // over K-1 standardized effects. Each effect is standardized by its own
  // estimated error, making the reference draw t-distributed with the
  // bin's degrees of freedom.
  Vec stats(M);
  for (int m = 0; m < M; ++m) {
    RandomStream rs(seed, {kCompTag, 2, static_cast<std::uint64_t>(m)});
    double q = 0.0;
    for (int k = 0; k < K - 1; ++k) {
      const double z = rs.student_t(std::max(1, est.counts[k] - 1));
      if (z < 0.0) q += z * z;
    }
    stats[m] = q;
  }
  int count = 0;
  for (int m = 0; m < M; ++m)
    if (stats[m] >= r.statistic) ++count;
  r.p_value = (1.0 + count) / (M + 1.0);
  std::sort(stats.data(), stats.data() + M);
  const int q = std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * M)), 1, M);
  r.critical_value = stats[q - 1];
  r.reject = r.p_value <= alpha;
  return r;
}

ComparatorReport range_test(const SubgroupEstimates& est, double alpha, int M,
                            std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("alpha must lie in (0,1)");
  if (M < 1) throw ValidationError("Monte Carlo draw count must be >= 1");
  ComparatorReport r;
  r.name = "range";
  r.alpha = alpha;
  r.M = M;
  r.seed = seed;
  r.bins_used = est.k();
  r.dropped_bins = est.dropped_bins;
  const int K = est.k();

  // reject iff max z > c and min z < -c, i.e. min(max z, -min z) > c
  auto range_stat = [K](const Vec& z) {
    return std::min(z.maxCoeff(), -z.minCoeff());
  };
  r.statistic = range_stat(standardized(est));

  // least-favorable configuration as in the likelihood-ratio comparator:
  // one divergent effect pins its side, so the statistic reduces to the
  // largest opposite-sign standardized effect over K-1 nulls
  Vec stats(M);
  for (int m = 0; m < M; ++m) {
    RandomStream rs(seed, {kCompTag, 3, static_cast<std::uint64_t>(m)});
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K - 1; ++k) {
      const double z = rs.student_t(std::max(1, est.counts[k] - 1));
      mx = std::max(mx, -z);
    }
    stats[m] = mx;
  }
  int count = 0;
  for (int m = 0; m < M; ++m)
    if (stats[m] >= r.statistic) ++count;
  r.p_value = (1.0 + count) / (M + 1.0);
  std::sort(stats.data(), stats.data() + M);
  const int q = std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * M)), 1, M);
  r.critical_value = stats[q - 1];  // the calibrated c
  r.reject = r.statistic > r.critical_value;
  return r;
}

nlohmann::json ComparatorReport::to_json() const {
  nlohmann::json j;
  j["kind"] = "comparator";
  j["comparator"] = name;
  j["statistic"] = statistic;
  j["critical_value"] = critical_value;
  j["p_value"] = p_value;
  j["reject"] = reject;
  j["alpha"] = alpha;
  j["bootstrap_draws"] = M;
  j["seed"] = seed;
  j["bins_used"] = bins_used;
  j["dropped_bins"] = dropped_bins;
  j["warnings"] = warnings;
  return j;
}

}  // namespace hte
