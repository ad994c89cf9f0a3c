#include "hte/simlab.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "hte/rng.hpp"

namespace hte {

namespace {

constexpr std::uint64_t kSimTag = 0x51413ULL;
constexpr std::uint64_t kDataTag = 1;
constexpr std::uint64_t kTestTag = 2;

inline double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void DgpConfig::validate() const {
  if (setting < 1 || setting > 5)
    throw ValidationError("setting must be in {1,...,5}");
  if (n < 2) throw ValidationError("n must be >= 2");
  if (!(noise_sd > 0.0)) throw ValidationError("noise sd must be > 0");
}

double dgp_gamma(int setting, double x3) {
  switch (setting) {
    case 1: return 0.75;
    case 2: return x3 > 0.5 ? 15.0 * (x3 - 0.5) : 0.0;
    case 3: return 3.0 * (1.0 - x3 * x3);
    case 4: return 3.0 * (x3 > 0 ? 1.0 : (x3 < 0 ? -1.0 : 0.0)) * x3 * x3;
    case 5: return 3.0 * std::cos(1.5 * kPi * x3);
    default: throw ValidationError("setting must be in {1,...,5}");
  }
}

double dgp_propensity(double x1, double x2) {
  return expit(x1 / 8.0 + std::sin(kPi * x2) / 4.0);
}

double dgp_mean_outcome(const Eigen::RowVectorXd& x, int a, int setting) {
  const double h = x[0] + expit(0.5 * (x[1] + x[2]));
  return h + a * dgp_gamma(setting, x[2]);
}

Sample simulate(const DgpConfig& config) {
  config.validate();
  RandomStream rs(config.seed, {kSimTag, static_cast<std::uint64_t>(config.setting)});
  const int n = config.n;
  Sample sm;
  sm.x.resize(n, 3);
  sm.a.resize(n);
  sm.y.resize(n);
  sm.s = {2};  // x3
  for (int i = 0; i < n; ++i) {
    const double x1 = 2.0 * rs.uniform() - 1.0;
    const double x2 = 2.0 * rs.uniform() - 1.0;
    const double x3 = 2.0 * rs.uniform() - 1.0;
    sm.x(i, 0) = x1;
    sm.x(i, 1) = x2;
    sm.x(i, 2) = x3;
    sm.a[i] = rs.uniform() < dgp_propensity(x1, x2) ? 1 : 0;
    sm.y[i] = dgp_mean_outcome(sm.x.row(i), sm.a[i], config.setting) +
              config.noise_sd * rs.normal();
  }
  return sm;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::QuantMonotone: return "quant_monotone";
    case Method::QuantNonmonotone: return "quant_nonmonotone";
    case Method::QuantUnstructured: return "quant_unstructured";
    case Method::QualMonotone: return "qual_monotone";
    case Method::QualNonmonotone: return "qual_nonmonotone";
    case Method::QualGailSimon: return "qual_gail_simon";
    case Method::QualRange: return "qual_range";
  }
  return "";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::QuantMonotone, Method::QuantNonmonotone,
                   Method::QuantUnstructured, Method::QualMonotone,
                   Method::QualNonmonotone, Method::QualGailSimon,
                   Method::QualRange})
    if (method_name(m) == name) return m;
  throw ValidationError("unknown method '" + name + "'");
}

namespace {

bool replicate(const StudyConfig& config, int setting, int n, Method method,
               std::uint64_t cell, int rep) {
  DgpConfig dgp;
  dgp.setting = setting;
  dgp.n = n;
  dgp.seed = derive_stream(config.seed,
                           {kDataTag, cell, static_cast<std::uint64_t>(rep)});
  const Sample sample = simulate(dgp);
  const NuisanceFit fit =
      fit_nuisance(sample, config.outcome, config.propensity, config.epsilon);
  const PseudoOutcomes pseudo = pseudo_outcomes(sample, fit);

  TestOptions opt;
  opt.alpha = config.alpha;
  opt.M = config.M;
  opt.seed = derive_stream(config.seed,
                           {kTestTag, cell, static_cast<std::uint64_t>(rep)});
  opt.threads = 1;

  PolicyClass threshold;
  threshold.variant = PolicyClass::Variant::ConstantThreshold;
  PolicyClass bv;
  bv.variant = PolicyClass::Variant::BoundedVariation;
  bv.lambda = config.lambda;
  bv.bv_bins = config.bv_bins;

  switch (method) {
    case Method::QuantMonotone:
      return quant_test(pseudo, threshold, sample.xs(), opt).reject;
    case Method::QuantNonmonotone:
      return quant_test(pseudo, bv, sample.xs(), opt).reject;
    case Method::QualMonotone:
      return qual_test(pseudo, threshold, sample.xs(), config.delta, opt).reject;
    case Method::QualNonmonotone:
      return qual_test(pseudo, bv, sample.xs(), config.delta, opt).reject;
    case Method::QuantUnstructured: {
      const auto est =
          subgroup_aipw(pseudo, sample.xs().col(0), config.comparator_bins);
      return unstructured_quant_test(est, config.alpha, config.M, opt.seed)
          .reject;
    }
    case Method::QualGailSimon: {
      const auto est =
          subgroup_aipw(pseudo, sample.xs().col(0), config.comparator_bins);
      return gail_simon_test(est, config.alpha, config.M, opt.seed).reject;
    }
    case Method::QualRange: {
      const auto est =
          subgroup_aipw(pseudo, sample.xs().col(0), config.comparator_bins);
      return range_test(est, config.alpha, config.M, opt.seed).reject;
    }
  }
  throw std::logic_error("unreachable");
}

struct Cell {
  int setting, n;
  Method method;
};

}  // namespace

bool run_replication(const StudyConfig& config, int setting, int n,
                     Method method, std::uint64_t cell_index, int rep_index) {
  return replicate(config, setting, n, method, cell_index, rep_index);
}

StudyReport run_study(const StudyConfig& config, const StudyProgress& progress) {
  if (config.R < 1) throw ValidationError("replication count must be >= 1");
  if (config.M < 1) throw ValidationError("bootstrap draw count must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ValidationError("alpha must lie in (0,1)");
  for (int setting : config.settings) {
    DgpConfig probe;
    probe.setting = setting;
    probe.n = std::max(2, config.ns.empty() ? 2 : config.ns.front());
    probe.validate();
  }
  for (int n : config.ns)
    if (n < 2) throw ValidationError("n must be >= 2");
  std::vector<Cell> cells;
  for (int setting : config.settings)
    for (int n : config.ns)
      for (Method m : config.methods) cells.push_back({setting, n, m});
  const int C = static_cast<int>(cells.size());
  const int R = config.R;

  // outcome per (cell, rep): 1 reject, 0 keep, -1 failure
  std::vector<std::int8_t> outcome(static_cast<std::size_t>(C) * R, 0);
  std::vector<double> item_seconds(static_cast<std::size_t>(C) * R, 0.0);

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int item = next.fetch_add(1);
      if (item >= C * R) return;
      const int ci = item / R, rep = item % R;
      const auto t0 = std::chrono::steady_clock::now();
      std::int8_t res;
      try {
        res = replicate(config, cells[ci].setting, cells[ci].n,
                        cells[ci].method, static_cast<std::uint64_t>(ci), rep)
                  ? 1
                  : 0;
      } catch (const std::exception&) {
        res = -1;
      }
      const auto t1 = std::chrono::steady_clock::now();
      outcome[item] = res;
      item_seconds[item] =
          std::chrono::duration<double>(t1 - t0).count();
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  StudyReport report;
  for (int ci = 0; ci < C; ++ci) {
    StudyRow row;
    row.method = method_name(cells[ci].method);
    row.setting = cells[ci].setting;
    row.n = cells[ci].n;
    row.R = R;
    int rejections = 0;
    double secs = 0.0;
    for (int rep = 0; rep < R; ++rep) {
      const std::int8_t v = outcome[static_cast<std::size_t>(ci) * R + rep];
      if (v < 0) ++row.failures;
      if (v == 1) ++rejections;
      secs += item_seconds[static_cast<std::size_t>(ci) * R + rep];
    }
    const int reff = R - row.failures;
    row.proportion = reff > 0 ? static_cast<double>(rejections) / reff : 0.0;
    row.mcse = reff > 0
                   ? std::sqrt(row.proportion * (1.0 - row.proportion) / reff)
                   : 0.0;
    row.seconds = secs;
    report.rows.push_back(row);
    if (progress) progress(row);
  }
  return report;
}

std::string StudyReport::to_csv() const {
  std::ostringstream os;
  os << "method,setting,n,R,failures,proportion,mcse,seconds\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%.6g,%.6g,%.3f\n",
                  r.method.c_str(), r.setting, r.n, r.R, r.failures,
                  r.proportion, r.mcse, r.seconds);
    os << buf;
  }
  return os.str();
}

nlohmann::json StudyReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method},
                   {"setting", r.setting},
                   {"n", r.n},
                   {"R", r.R},
                   {"failures", r.failures},
                   {"proportion", r.proportion},
                   {"mcse", r.mcse},
                   {"seconds", r.seconds}});
  }
  return {{"kind", "study"}, {"rows", arr}};
}

}  // namespace hte
