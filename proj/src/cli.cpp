#include "hte/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "hte/comparators.hpp"
#include "hte/data.hpp"
#include "hte/het_test.hpp"
#include "hte/nuisance.hpp"
#include "hte/pseudo.hpp"
#include "hte/regression.hpp"
#include "hte/simlab.hpp"

namespace hte {

namespace {

using nlohmann::json;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

OutcomeSpec outcome_spec(const RunConfig& c) {
  OutcomeSpec s;
  if (c.outcome == "linear") {
    s.kind = OutcomeSpec::Kind::Linear;
  } else if (c.outcome == "poly") {
    s.kind = OutcomeSpec::Kind::Polynomial;
    s.degree = c.outcome_degree;
  } else if (c.outcome == "spline") {
    s.kind = OutcomeSpec::Kind::Spline;
    s.knots = c.outcome_knots;
  } else {
    throw ValidationError("unknown outcome spec '" + c.outcome + "'");
  }
  return s;
}

PropensitySpec propensity_spec(const RunConfig& c) {
  PropensitySpec s;
  if (c.propensity == "logistic-linear") {
    s.kind = PropensitySpec::Kind::LogisticLinear;
  } else if (c.propensity == "logistic-poly") {
    s.kind = PropensitySpec::Kind::LogisticPolynomial;
    s.degree = c.propensity_degree;
  } else if (c.propensity == "known") {
    s.kind = PropensitySpec::Kind::Known;
    s.known_value = c.propensity_value;
  } else {
    throw ValidationError("unknown propensity spec '" + c.propensity + "'");
  }
  return s;
}

PolicyClass policy_class(const RunConfig& c) {
  PolicyClass cls;
  if (c.class_name == "threshold") {
    cls.variant = PolicyClass::Variant::ConstantThreshold;
  } else if (c.class_name == "linear") {
    cls.variant = PolicyClass::Variant::LinearThreshold;
  } else if (c.class_name == "bv") {
    cls.variant = PolicyClass::Variant::BoundedVariation;
  } else if (c.class_name == "tree") {
    cls.variant = PolicyClass::Variant::Tree;
  } else {
    throw ValidationError("unknown class '" + c.class_name + "'");
  }
  cls.lambda = c.lambda;
  cls.bv_bins = c.grid;
  cls.tree_depth = c.depth;
  cls.tree_quantiles = c.quantiles;
  return cls;
}

NuisanceFit fit_from_config(const Sample& sample, const RunConfig& c) {
  if (c.crossfit_folds > 0)
    return crossfit(sample, outcome_spec(c), propensity_spec(c),
                    c.crossfit_folds, c.seed, c.epsilon);
  return fit_nuisance(sample, outcome_spec(c), propensity_spec(c), c.epsilon);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << content;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

TestOptions test_options(const RunConfig& c) {
  TestOptions opt;
  opt.alpha = c.alpha;
  opt.M = c.bootstrap > 0 ? c.bootstrap : 1000;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.variance_weighted = c.variance_weighted;
  return opt;
}

}  // namespace

json RunConfig::to_json() const {
  return json{{"data", data_path},
              {"modifier", modifiers},
              {"class", class_name},
              {"lambda", lambda},
              {"grid", grid},
              {"depth", depth},
              {"quantiles", quantiles},
              {"delta", delta},
              {"alpha", alpha},
              {"bootstrap", bootstrap},
              {"reps", reps},
              {"seed", seed},
              {"out", out},
              {"threads", threads},
              {"variance_weighted", variance_weighted},
              {"outcome", outcome},
              {"outcome_degree", outcome_degree},
              {"outcome_knots", outcome_knots},
              {"propensity", propensity},
              {"propensity_degree", propensity_degree},
              {"propensity_value", propensity_value},
              {"epsilon", epsilon},
              {"crossfit_folds", crossfit_folds},
              {"settings", settings},
              {"n", ns},
              {"methods", methods},
              {"comparator_bins", comparator_bins},
              {"curve_knots", curve_knots}};
}

void RunConfig::apply_json(const json& j) {
  maybe(j, "data", data_path);
  maybe(j, "modifier", modifiers);
  maybe(j, "class", class_name);
  maybe(j, "lambda", lambda);
  maybe(j, "grid", grid);
  maybe(j, "depth", depth);
  maybe(j, "quantiles", quantiles);
  maybe(j, "delta", delta);
  maybe(j, "alpha", alpha);
  maybe(j, "bootstrap", bootstrap);
  maybe(j, "reps", reps);
  maybe(j, "seed", seed);
  maybe(j, "out", out);
  maybe(j, "threads", threads);
  maybe(j, "variance_weighted", variance_weighted);
  maybe(j, "outcome", outcome);
  maybe(j, "outcome_degree", outcome_degree);
  maybe(j, "outcome_knots", outcome_knots);
  maybe(j, "propensity", propensity);
  maybe(j, "propensity_degree", propensity_degree);
  maybe(j, "propensity_value", propensity_value);
  maybe(j, "epsilon", epsilon);
  maybe(j, "crossfit_folds", crossfit_folds);
  maybe(j, "settings", settings);
  maybe(j, "n", ns);
  maybe(j, "methods", methods);
  maybe(j, "comparator_bins", comparator_bins);
  maybe(j, "curve_knots", curve_knots);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  c.apply_json(j);
  return c;
}

int cmd_test_quant(const RunConfig& config) {
  return guarded([&] {
    if (config.data_path.empty()) throw ValidationError("--data is required");
    const Sample sample = load_csv(config.data_path, config.modifiers);
    const NuisanceFit fit = fit_from_config(sample, config);
    const PolicyClass cls = policy_class(config);
    QuantTestReport report = quant_test(sample, fit, cls, test_options(config));
    json j = report.to_json(cls);
    j["config"] = config.to_json();
    j["nuisance"] = {{"outcome", fit.outcome_method},
                     {"propensity", fit.propensity_method},
                     {"epsilon", fit.epsilon},
                     {"crossfitted", fit.crossfitted}};
    write_output(config.out, j.dump(2));
  });
}

int cmd_test_qual(const RunConfig& config) {
  return guarded([&] {
    if (config.data_path.empty()) throw ValidationError("--data is required");
    const Sample sample = load_csv(config.data_path, config.modifiers);
    const NuisanceFit fit = fit_from_config(sample, config);
    const PolicyClass cls = policy_class(config);
    QualTestReport report =
        qual_test(sample, fit, cls, config.delta, test_options(config));
    json j = report.to_json(cls);
    j["config"] = config.to_json();
    j["nuisance"] = {{"outcome", fit.outcome_method},
                     {"propensity", fit.propensity_method},
                     {"epsilon", fit.epsilon},
                     {"crossfitted", fit.crossfitted}};
    write_output(config.out, j.dump(2));
  });
}

int cmd_simulate(const RunConfig& config) {
  return guarded([&] {
    StudyConfig sc;
    sc.settings = config.settings;
    sc.ns = config.ns;
    sc.methods.clear();
    for (const auto& name : config.methods)
      sc.methods.push_back(method_from_name(name));
    if (sc.methods.empty()) throw ValidationError("no methods selected");
    sc.R = config.reps;
    sc.M = config.bootstrap > 0 ? config.bootstrap : 500;  // desk-scale default
    sc.alpha = config.alpha;
    sc.delta = config.delta;
    sc.seed = config.seed;
    sc.threads = config.threads;
    sc.lambda = config.lambda;
    sc.bv_bins = config.grid;
    sc.comparator_bins = config.comparator_bins;
    sc.epsilon = config.epsilon;
    sc.outcome = outcome_spec(config);
    sc.propensity = propensity_spec(config);

    const StudyReport report = run_study(sc, [](const StudyRow& row) {
      std::fprintf(stderr,
                   "cell done: method=%s setting=%d n=%d proportion=%.3f "
                   "(failures=%d, %.1fs)\n",
                   row.method.c_str(), row.setting, row.n, row.proportion,
                   row.failures, row.seconds);
    });

    const std::string prefix = config.out.empty() ? "study" : config.out;
    {
      std::ofstream csv(prefix + ".csv");
      if (!csv) throw ValidationError("cannot write " + prefix + ".csv");
      csv << report.to_csv();
    }
    json j = report.to_json();
    j["config"] = config.to_json();
    std::ofstream js(prefix + ".json");
    if (!js) throw ValidationError("cannot write " + prefix + ".json");
    js << j.dump(2);
  });
}

int cmd_curve(const RunConfig& config) {
  return guarded([&] {
    if (config.data_path.empty()) throw ValidationError("--data is required");
    const Sample sample = load_csv(config.data_path, config.modifiers);
    if (sample.s.size() != 1)
      throw ValidationError("curve requires scalar modifier");
    const NuisanceFit fit = fit_from_config(sample, config);
    const PseudoOutcomes pseudo = pseudo_outcomes(sample, fit);

    const Mat xsm = sample.xs();
    const Basis basis = Basis::natural_spline(xsm, config.curve_knots);
    const LeastSquaresFit curve = fit_least_squares(xsm, pseudo.psi, basis);

    const double lo = xsm.col(0).minCoeff(), hi = xsm.col(0).maxCoeff();
    const int G = 200;
    std::string csv = "x,fit,lower,upper\n";
    const double sigma2 = std::max(curve.sigma2, 1e-30);
    char buf[160];
    for (int g = 0; g < G; ++g) {
      const double x = G > 1 ? lo + (hi - lo) * g / (G - 1) : lo;
      Mat xg(1, 1);
      xg(0, 0) = x;
      const Mat h = curve.basis.design(xg);
      const double fitted = (h * curve.coef)(0, 0);
      const double se =
          std::sqrt(sigma2 * (h * curve.xtx_inv * h.transpose())(0, 0));
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", x, fitted,
                    fitted - 1.959963984540054 * se,
                    fitted + 1.959963984540054 * se);
      csv += buf;
    }
    write_output(config.out, csv);
  });
}

}  // namespace hte
