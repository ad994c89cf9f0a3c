#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hte/data.hpp"

namespace hte {

// 1(x >= t) or 1(x <= t); t may be +-infinity (all-zeros / all-ones).
struct ThresholdRule {
  double threshold = 0.0;
  bool geq = true;
};

// 1(rho0 + rho'x >= 0)
struct LinearRule {
  Vec rho;
  double rho0 = 0.0;
};

// step function on equal-width bins: f(x) = b[bin(x)], bins clamped to the
// observed range
struct BvRule {
  double lo = 0.0;
  double width = 0.0;
  Vec b;
};

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int left = -1, right = -1;  // children: x[feature] <= threshold goes left
  int leaf = 0;               // leaf label in {0,1}
};

struct TreeRule {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct RuleDescription {
  std::variant<ThresholdRule, LinearRule, BvRule, TreeRule> rule;
  double value = 0.0;  // achieved objective (1/n) sum_i w_i f(x_i)

  std::string describe() const;
};

Vec evaluate(const RuleDescription& rule, const Mat& xs);

struct PolicyClass {
  enum class Variant { ConstantThreshold, LinearThreshold, BoundedVariation, Tree };
  Variant variant = Variant::ConstantThreshold;
  double lambda = 2.0;      // BoundedVariation: total-variation budget
  int bv_bins = 100;        // BoundedVariation: grid size
  int tree_depth = 2;
  int tree_quantiles = 20;  // split candidates per coordinate

  std::string name() const;
  void validate(int dim) const;
};

// Exact maximizer of f -> (1/n) sum_i w_i f(xs_i) over the class. Stateful so
// repeated solves (bootstrap draws) reuse sorted orders / the LP basis.
class ClassOptimizer {
 public:
  virtual ~ClassOptimizer() = default;
  virtual RuleDescription maximize(const Vec& weights) = 0;
  RuleDescription minimize(const Vec& weights) {
    RuleDescription r = maximize(-weights);
    r.value = -r.value;
    return r;
  }
};

std::unique_ptr<ClassOptimizer> make_optimizer(const PolicyClass& cls,
                                               const Mat& xs);

RuleDescription maximize(const PolicyClass& cls, const Vec& weights,
                         const Mat& xs);
RuleDescription minimize(const PolicyClass& cls, const Vec& weights,
                         const Mat& xs);

// Finite candidate set inducing every distinct labeling (indicator classes)
// or every vertex (BoundedVariation, small grids only). Used by the
// variance-weighted statistics.
std::vector<RuleDescription> enumerate_candidates(const PolicyClass& cls,
                                                  const Mat& xs);

// tree split candidates at empirical quantiles, one sorted set per coordinate
std::vector<std::vector<double>> tree_split_candidates(const Mat& xs,
                                                       int quantiles);

}  // namespace hte
