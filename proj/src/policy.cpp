#include "hte/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "hte/simplex.hpp"

namespace hte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string PolicyClass::name() const {
  switch (variant) {
    case Variant::ConstantThreshold: return "threshold";
    case Variant::LinearThreshold: return "linear";
    case Variant::BoundedVariation: return "bv";
    case Variant::Tree: return "tree";
  }
  return "";
}

void PolicyClass::validate(int dim) const {
  switch (variant) {
    case Variant::ConstantThreshold:
      if (dim != 1)
        throw ValidationError("threshold class needs a scalar effect modifier");
      break;
    case Variant::BoundedVariation:
      if (dim != 1)
        throw ValidationError(
            "bounded-variation class needs a scalar effect modifier");
      if (!(lambda > 0.0))
        throw ValidationError("bounded-variation budget lambda must be > 0");
      if (bv_bins < 1) throw ValidationError("bv grid needs at least 1 bin");
      break;
    case Variant::LinearThreshold:
      if (dim < 1 || dim > 3)
        throw ValidationError(
            "linear threshold class supports 1 to 3 effect modifiers");
      break;
    case Variant::Tree:
      if (dim < 1) throw ValidationError("tree class needs effect modifiers");
      if (tree_depth < 0 || tree_quantiles < 1)
        throw ValidationError("invalid tree hyperparameters");
      break;
  }
}

std::string RuleDescription::describe() const {
  struct V {
    std::string operator()(const ThresholdRule& r) const {
      return std::string("1(x ") + (r.geq ? ">= " : "<= ") + fmt(r.threshold) +
             ")";
    }
    std::string operator()(const LinearRule& r) const {
      std::ostringstream os;
      os << "1(" << fmt(r.rho0);
      for (int j = 0; j < r.rho.size(); ++j)
        os << (r.rho[j] < 0 ? " - " : " + ") << fmt(std::abs(r.rho[j])) << "*x"
           << (j + 1);
      os << " >= 0)";
      return os.str();
    }
    std::string operator()(const BvRule& r) const {
      double tv = 0.0;
      for (int k = 1; k < r.b.size(); ++k) tv += std::abs(r.b[k] - r.b[k - 1]);
      return "step(bins=" + std::to_string(r.b.size()) + ", tv=" + fmt(tv) +
             ")";
    }
    std::string operator()(const TreeRule& r) const {
      std::function<std::string(int)> rec = [&](int k) -> std::string {
        const TreeNode& nd = r.nodes[k];
        if (nd.feature < 0) return std::to_string(nd.leaf);
        return "(x" + std::to_string(nd.feature + 1) + " <= " +
               fmt(nd.threshold) + " ? " + rec(nd.left) + " : " +
               rec(nd.right) + ")";
      };
      return "tree" + rec(0);
    }
  };
  return std::visit(V{}, rule);
}

Vec evaluate(const RuleDescription& rule, const Mat& xs) {
  const int n = static_cast<int>(xs.rows());
  Vec f(n);
  if (const auto* t = std::get_if<ThresholdRule>(&rule.rule)) {
    if (xs.cols() != 1)
      throw ValidationError("threshold rule needs a scalar modifier");
    for (int i = 0; i < n; ++i)
      f[i] = (t->geq ? xs(i, 0) >= t->threshold : xs(i, 0) <= t->threshold)
                 ? 1.0
                 : 0.0;
  } else if (const auto* l = std::get_if<LinearRule>(&rule.rule)) {
    if (xs.cols() != l->rho.size())
      throw ValidationError("linear rule dimension mismatch");
    // compare the accumulated projection against -rho0 so the comparison is
    // bitwise identical to the optimizer's scan on tied points
    for (int i = 0; i < n; ++i) {
      double dot = 0.0;
      for (int j = 0; j < l->rho.size(); ++j) dot += l->rho[j] * xs(i, j);
      f[i] = dot >= -l->rho0 ? 1.0 : 0.0;
    }
  } else if (const auto* b = std::get_if<BvRule>(&rule.rule)) {
    if (xs.cols() != 1)
      throw ValidationError("bounded-variation rule needs a scalar modifier");
    const int p = static_cast<int>(b->b.size());
    for (int i = 0; i < n; ++i) {
      int k = b->width > 0.0
                  ? static_cast<int>(std::floor((xs(i, 0) - b->lo) / b->width))
                  : 0;
      k = std::clamp(k, 0, p - 1);
      f[i] = b->b[k];
    }
  } else {
    const auto& tr = std::get<TreeRule>(rule.rule);
    for (int i = 0; i < n; ++i) {
      int k = 0;
      while (tr.nodes[k].feature >= 0) {
        const TreeNode& nd = tr.nodes[k];
        if (nd.feature >= xs.cols())
          throw ValidationError("tree rule dimension mismatch");
        k = xs(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      f[i] = tr.nodes[k].leaf;
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// constant-threshold scan

namespace {

class ThresholdOptimizer final : public ClassOptimizer {
 public:
  explicit ThresholdOptimizer(const Mat& xs) {
    n_ = static_cast<int>(xs.rows());
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return xs(a, 0) < xs(b, 0);
    });
    vals_.resize(n_);
    for (int k = 0; k < n_; ++k) vals_[k] = xs(order_[k], 0);
    for (int k = 0; k < n_; ++k)
      if (k == 0 || vals_[k] != vals_[k - 1]) group_start_.push_back(k);
  }

  RuleDescription maximize(const Vec& w) override {
    // suffix[k] = sum of weights of sorted positions k..n-1
    std::vector<double> suffix(n_ + 1, 0.0);
    for (int k = n_ - 1; k >= 0; --k) suffix[k] = suffix[k + 1] + w[order_[k]];
    const double total = suffix[0];

    double best = -kInf;
    ThresholdRule best_rule;
    auto consider = [&](double v, double t, bool geq) {
      if (v > best) {
        best = v;
        best_rule = {t, geq};
      }
    };
    // ties break toward the ">=" orientation and the smallest cutoff
    consider(total, -kInf, true);
    for (int g : group_start_) consider(suffix[g], vals_[g], true);
    consider(0.0, kInf, true);
    consider(0.0, -kInf, false);
    for (std::size_t gi = 0; gi < group_start_.size(); ++gi) {
      const int end = gi + 1 < group_start_.size()
                          ? group_start_[gi + 1]
                          : n_;
      consider(total - suffix[end], vals_[group_start_[gi]], false);
    }
    consider(total, kInf, false);

    RuleDescription out;
    out.rule = best_rule;
    out.value = best / n_;
    return out;
  }

 private:
  int n_ = 0;
  std::vector<int> order_;
  std::vector<double> vals_;
  std::vector<int> group_start_;
};

// ---------------------------------------------------------------------------
// linear threshold rules

class LinearOptimizer final : public ClassOptimizer {
 public:
  explicit LinearOptimizer(const Mat& xs) : xs_(xs) {
    n_ = static_cast<int>(xs.rows());
    d_ = static_cast<int>(xs.cols());
    if (d_ == 2) build_directions2();
  }

  RuleDescription maximize(const Vec& w) override {
    best_ = -kInf;
    // sentinels: f == 0 and f == 1
    consider(0.0, LinearRule{Vec::Zero(d_), -1.0});
    consider(w.sum(), LinearRule{Vec::Zero(d_), 0.0});
    if (d_ == 1) {
      scan_direction(Vec::Constant(1, 1.0), w);
      scan_direction(Vec::Constant(1, -1.0), w);
    } else if (d_ == 2) {
      Vec v(2);
      for (const auto& dir : dirs2_) {
        v[0] = dir[0];
        v[1] = dir[1];
        scan_direction(v, w);
      }
    } else {
      enumerate3(w);
    }
    RuleDescription out;
    out.rule = best_rule_;
    out.value = best_ / n_;
    return out;
  }

  // every scan candidate (all distinct labelings for dim <= 2)
  void enumerate_into(std::vector<RuleDescription>& out) const {
    out.push_back({LinearRule{Vec::Zero(d_), -1.0}, 0.0});
    out.push_back({LinearRule{Vec::Zero(d_), 0.0}, 0.0});
    std::vector<Vec> dirs;
    if (d_ == 1) {
      dirs.push_back(Vec::Constant(1, 1.0));
      dirs.push_back(Vec::Constant(1, -1.0));
    } else if (d_ == 2) {
      for (const auto& dir : dirs2_) {
        Vec v(2);
        v[0] = dir[0];
        v[1] = dir[1];
        dirs.push_back(v);
      }
    } else {
      throw ValidationError(
          "linear candidate enumeration supports up to 2 modifiers");
    }
    for (const Vec& v : dirs) {
      std::vector<double> t(n_);
      for (int i = 0; i < n_; ++i) {
        double dot = 0.0;
        for (int j = 0; j < d_; ++j) dot += v[j] * xs_(i, j);
        t[i] = dot;
      }
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      for (double tau : t) out.push_back({LinearRule{v, -tau}, 0.0});
    }
  }

 private:
  void consider(double v, LinearRule r) {
    if (v > best_) {
      best_ = v;
      best_rule_ = std::move(r);
    }
  }

  // candidates 1(v'x >= u) for u at each observed projection value;
  // projections accumulated exactly as evaluate() does
  void scan_direction(const Vec& v, const Vec& w) {
    std::vector<double> t(n_);
    for (int i = 0; i < n_; ++i) {
      double dot = 0.0;
      for (int j = 0; j < d_; ++j) dot += v[j] * xs_(i, j);
      t[i] = dot;
    }
    std::vector<int> ord(n_);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int a, int b) { return t[a] < t[b]; });
    double suffix = 0.0;
    // walk groups of equal projection from the top
    int k = n_ - 1;
    while (k >= 0) {
      int g = k;
      double sum = 0.0;
      while (g >= 0 && t[ord[g]] == t[ord[k]]) {
        sum += w[ord[g]];
        --g;
      }
      suffix += sum;
      consider(suffix, LinearRule{v, -t[ord[k]]});
      k = g;
    }
  }

  void build_directions2() {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    // critical directions are kept as exact perpendiculars (-dy, dx) so that
    // projection ties of collinear points stay exact in floating point
    std::vector<std::pair<double, Eigen::Vector2d>> crit;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const double dx = xs_(j, 0) - xs_(i, 0), dy = xs_(j, 1) - xs_(i, 1);
        if (dx == 0.0 && dy == 0.0) continue;
        for (double sgn : {1.0, -1.0}) {
          const Eigen::Vector2d v(-sgn * dy, sgn * dx);
          double a = std::atan2(v[1], v[0]);
          if (a < 0) a += kTwoPi;
          crit.emplace_back(a, v);
        }
      }
    std::sort(crit.begin(), crit.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    crit.erase(std::unique(crit.begin(), crit.end(),
                           [](const auto& a, const auto& b) {
                             return a.first == b.first;
                           }),
               crit.end());
    for (const auto& [a, v] : crit) dirs2_.push_back(v);
    // sector interiors: labelings are constant between consecutive critical
    // angles, so one midpoint per sector completes the enumeration
    for (std::size_t k = 0; k < crit.size(); ++k) {
      const double a = crit[k].first;
      const double b =
          k + 1 < crit.size() ? crit[k + 1].first : crit[0].first + kTwoPi;
      const double mid = std::fmod(0.5 * (a + b), kTwoPi);
      dirs2_.emplace_back(std::cos(mid), std::sin(mid));
    }
    if (dirs2_.empty()) dirs2_.emplace_back(1.0, 0.0);
  }

  // anchor + cross-product rays with small tilts; exact for points in
  // general position
  void enumerate3(const Vec& w) {
    const double e1 = 1e-6, e2 = 1e-10;
    Vec v(3);
    auto try_normal = [&](const Eigen::Vector3d& nv,
                          const Eigen::Vector3d& anchor) {
      if (!nv.allFinite() || nv.norm() == 0.0) return;
      v[0] = nv[0];
      v[1] = nv[1];
      v[2] = nv[2];
      double adot = 0.0;
      for (int j = 0; j < 3; ++j) adot += v[j] * anchor[j];
      const double rho0 = -adot;
      double val = 0.0;
      for (int i = 0; i < n_; ++i) {
        double dot = 0.0;
        for (int j = 0; j < 3; ++j) dot += v[j] * xs_(i, j);
        if (dot >= -rho0) val += w[i];
      }
      consider(val, LinearRule{v, rho0});
    };
    for (int ap = 0; ap < n_; ++ap) {
      const Eigen::Vector3d p = xs_.row(ap).transpose();
      for (int i = 0; i < n_; ++i) {
        if (i == ap) continue;
        const Eigen::Vector3d yi = xs_.row(i).transpose() - p;
        if (yi.norm() == 0.0) continue;
        const Eigen::Vector3d ti = yi.normalized();
        // single-contact fallback directions
        for (double s : {1.0, -1.0}) try_normal(s * ti, p);
        for (int j = i + 1; j < n_; ++j) {
          if (j == ap) continue;
          const Eigen::Vector3d yj = xs_.row(j).transpose() - p;
          const Eigen::Vector3d cr = yi.cross(yj);
          if (cr.norm() < 1e-14 * yi.norm() * yj.norm()) continue;
          const Eigen::Vector3d base = cr.normalized();
          const Eigen::Vector3d tj = yj.normalized();
          for (double s0 : {1.0, -1.0}) {
            for (double s1 : {0.0, 1.0, -1.0}) {
              for (double s2 : {0.0, 1.0, -1.0}) {
                try_normal(s0 * base + s1 * e1 * ti + s2 * e2 * tj, p);
              }
            }
          }
        }
      }
    }
  }

  Mat xs_;
  int n_ = 0, d_ = 0;
  std::vector<Eigen::Vector2d> dirs2_;
  double best_ = -kInf;
  LinearRule best_rule_;
};

// ---------------------------------------------------------------------------
// finite-depth trees over quantile splits

}  // namespace

// split candidates at empirical quantiles, one set per coordinate
std::vector<std::vector<double>> tree_split_candidates(const Mat& xs,
                                                       int quantiles) {
  const int n = static_cast<int>(xs.rows());
  std::vector<std::vector<double>> splits(xs.cols());
  for (int j = 0; j < xs.cols(); ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = xs(i, j);
    std::sort(col.begin(), col.end());
    std::vector<double> sp;
    if (n <= quantiles) {
      sp = col;
    } else {
      for (int k = 1; k <= quantiles; ++k) {
        const double q = static_cast<double>(k) / (quantiles + 1);
        sp.push_back(col[static_cast<int>(std::floor(q * (n - 1)))]);
      }
    }
    std::sort(sp.begin(), sp.end());
    sp.erase(std::unique(sp.begin(), sp.end()), sp.end());
    splits[j] = std::move(sp);
  }
  return splits;
}

namespace {

class TreeOptimizer final : public ClassOptimizer {
 public:
  TreeOptimizer(const Mat& xs, int depth, int quantiles)
      : xs_(xs), depth_(depth) {
    n_ = static_cast<int>(xs.rows());
    d_ = static_cast<int>(xs.cols());
    splits_ = tree_split_candidates(xs, quantiles);
  }

  RuleDescription maximize(const Vec& w) override {
    std::vector<int> all(n_);
    std::iota(all.begin(), all.end(), 0);
    auto [val, nodes] = best_tree(all, depth_, w);
    RuleDescription out;
    out.rule = TreeRule{std::move(nodes)};
    out.value = val / n_;
    return out;
  }

 private:
  std::pair<double, std::vector<TreeNode>> best_tree(
      const std::vector<int>& cell, int depth, const Vec& w) {
    double sumw = 0.0;
    for (int i : cell) sumw += w[i];
    double best = std::max(0.0, sumw);
    std::vector<TreeNode> nodes{TreeNode{-1, 0.0, -1, -1, sumw > 0.0 ? 1 : 0}};
    if (depth == 0 || cell.empty()) return {best, std::move(nodes)};

    std::vector<int> left, right;
    for (int j = 0; j < d_; ++j) {
      for (double t : splits_[j]) {
        left.clear();
        right.clear();
        for (int i : cell) (xs_(i, j) <= t ? left : right).push_back(i);
        if (left.empty() || right.empty()) continue;
        auto [vl, nl] = best_tree(left, depth - 1, w);
        auto [vr, nr] = best_tree(right, depth - 1, w);
        if (vl + vr > best) {
          best = vl + vr;
          std::vector<TreeNode> merged;
          merged.reserve(1 + nl.size() + nr.size());
          merged.push_back(TreeNode{j, t, 1, 1 + static_cast<int>(nl.size()), 0});
          for (TreeNode nd : nl) {
            if (nd.feature >= 0) {
              nd.left += 1;
              nd.right += 1;
            }
            merged.push_back(nd);
          }
          const int off = 1 + static_cast<int>(nl.size());
          for (TreeNode nd : nr) {
            if (nd.feature >= 0) {
              nd.left += off;
              nd.right += off;
            }
            merged.push_back(nd);
          }
          nodes = std::move(merged);
        }
      }
    }
    return {best, std::move(nodes)};
  }

  Mat xs_;
  int n_ = 0, d_ = 0, depth_ = 0;
  std::vector<std::vector<double>> splits_;
};

// ---------------------------------------------------------------------------
// bounded-variation class: LP over the bin coefficients

class BvOptimizer final : public ClassOptimizer {
 public:
  BvOptimizer(const Mat& xs, double lambda, int bins)
      : lambda_(lambda), p_(bins) {
    n_ = static_cast<int>(xs.rows());
    lo_ = xs.col(0).minCoeff();
    const double hi = xs.col(0).maxCoeff();
    width_ = (hi - lo_) / p_;
    bin_of_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      int k = width_ > 0.0
                  ? static_cast<int>(std::floor((xs(i, 0) - lo_) / width_))
                  : 0;
      bin_of_[i] = std::clamp(k, 0, p_ - 1);
    }
    build_lp();
  }

  RuleDescription maximize(const Vec& w) override {
    Vec c = Vec::Zero(n_vars_);
    for (int i = 0; i < n_; ++i) c[bin_of_[i]] += w[i] / n_;
    double val;
    try {
      val = lp_.solve(c);
    } catch (const std::exception&) {
      build_lp();  // cold restart on numerical trouble
      val = lp_.solve(c);
    }
    const Vec x = lp_.x();
    RuleDescription out;
    BvRule r;
    r.lo = lo_;
    r.width = width_;
    r.b = x.head(p_);
    for (int k = 0; k < p_; ++k) r.b[k] = std::clamp(r.b[k], 0.0, 1.0);
    out.rule = std::move(r);
    out.value = val;
    return out;
  }

 private:
  void build_lp() {
    // variables: b_0..b_{p-1} in [0,1]; u_k, v_k >= 0 splitting
    // b_{k+1}-b_k = u_k - v_k; slack t in the budget row
    // rows 0..p-2: b_{k+1} - b_k - u_k + v_k = 0
    // row p-1:     sum_k (u_k + v_k) + t = lambda
    const int m = p_;
    n_vars_ = 3 * p_ - 1;
    std::vector<BoundedSimplex::SparseCol> cols(n_vars_);
    Vec ub(n_vars_), rhs = Vec::Zero(m);
    rhs[m - 1] = lambda_;
    for (int k = 0; k < p_; ++k) {
      if (k > 0) cols[k].push_back({k - 1, 1.0});
      if (k < p_ - 1) cols[k].push_back({k, -1.0});
      ub[k] = 1.0;
    }
    for (int k = 0; k < p_ - 1; ++k) {
      const int u = p_ + k, v = 2 * p_ - 1 + k;
      cols[u].push_back({k, -1.0});
      cols[u].push_back({m - 1, 1.0});
      cols[v].push_back({k, 1.0});
      cols[v].push_back({m - 1, 1.0});
      ub[u] = lambda_;
      ub[v] = lambda_;
    }
    const int t = 3 * p_ - 2;
    cols[t].push_back({m - 1, 1.0});
    ub[t] = lambda_;
    // b = 0 with v basic (degenerate) and the slack t = lambda is feasible
    std::vector<int> basis;
    for (int k = 0; k < p_ - 1; ++k) basis.push_back(2 * p_ - 1 + k);
    basis.push_back(t);
    lp_.set_problem(m, std::move(cols), std::move(rhs), std::move(ub),
                    std::move(basis));
  }

  double lambda_;
  int p_, n_ = 0, n_vars_ = 0;
  double lo_ = 0.0, width_ = 0.0;
  std::vector<int> bin_of_;
  BoundedSimplex lp_;
};

}  // namespace

std::unique_ptr<ClassOptimizer> make_optimizer(const PolicyClass& cls,
                                               const Mat& xs) {
  cls.validate(static_cast<int>(xs.cols()));
  if (xs.rows() < 1) throw ValidationError("empty data");
  switch (cls.variant) {
    case PolicyClass::Variant::ConstantThreshold:
      return std::make_unique<ThresholdOptimizer>(xs);
    case PolicyClass::Variant::LinearThreshold:
      return std::make_unique<LinearOptimizer>(xs);
    case PolicyClass::Variant::BoundedVariation:
      return std::make_unique<BvOptimizer>(xs, cls.lambda, cls.bv_bins);
    case PolicyClass::Variant::Tree:
      return std::make_unique<TreeOptimizer>(xs, cls.tree_depth,
                                             cls.tree_quantiles);
  }
  throw std::logic_error("unreachable");
}

RuleDescription maximize(const PolicyClass& cls, const Vec& weights,
                         const Mat& xs) {
  if (weights.size() != xs.rows())
    throw ValidationError("weights and points differ in length");
  for (int i = 0; i < weights.size(); ++i)
    if (!std::isfinite(weights[i]))
      throw ValidationError("non-finite weight");
  return make_optimizer(cls, xs)->maximize(weights);
}

RuleDescription minimize(const PolicyClass& cls, const Vec& weights,
                         const Mat& xs) {
  if (weights.size() != xs.rows())
    throw ValidationError("weights and points differ in length");
  return make_optimizer(cls, xs)->minimize(weights);
}

// ---------------------------------------------------------------------------
// candidate enumeration

namespace {

void bv_vertices(const PolicyClass& cls, const Mat& xs,
                 std::vector<RuleDescription>& out) {
  const int p = cls.bv_bins;
  if (p > 12)
    throw ValidationError(
        "bounded-variation candidate enumeration needs bv_bins <= 12");
  const double lo = xs.col(0).minCoeff();
  const double width = (xs.col(0).maxCoeff() - lo) / p;

  auto emit = [&](const std::vector<double>& levels,
                  const std::vector<int>& seg_end) {
    BvRule r;
    r.lo = lo;
    r.width = width;
    r.b.resize(p);
    int k = 0;
    for (std::size_t s = 0; s < levels.size(); ++s)
      for (; k <= seg_end[s]; ++k) r.b[k] = levels[s];
    RuleDescription rd;
    rd.rule = std::move(r);
    out.push_back(std::move(rd));
  };

  // vertices are piecewise constant with {0,1} segment levels plus at most
  // one fractional segment, the latter pinning the budget
  for (std::uint32_t mask = 0; mask < (1u << (p - 1)); ++mask) {
    std::vector<int> seg_end;
    for (int k = 0; k < p - 1; ++k)
      if (mask & (1u << k)) seg_end.push_back(k);
    seg_end.push_back(p - 1);
    const int m = static_cast<int>(seg_end.size());
    for (std::uint32_t assign = 0; assign < (1u << m); ++assign) {
      std::vector<double> levels(m);
      for (int s = 0; s < m; ++s) levels[s] = (assign >> s) & 1 ? 1.0 : 0.0;
      double tv = 0.0;
      for (int s = 1; s < m; ++s) tv += std::abs(levels[s] - levels[s - 1]);
      if (tv <= cls.lambda + 1e-12) emit(levels, seg_end);
      // one fractional segment at value c, budget active
      for (int sf = 0; sf < m; ++sf) {
        double a = 0.0, b = 0.0;  // tv = a + b*c for c in (0,1)
        for (int s = 1; s < m; ++s) {
          const bool lf = s - 1 == sf, rf = s == sf;
          if (lf == rf) {  // neither side fractional (both can't be)
            a += std::abs(levels[s] - levels[s - 1]);
          } else {
            const double other = lf ? levels[s] : levels[s - 1];
            // |c - other| = c if other==0 else 1-c
            if (other == 0.0) {
              b += 1.0;
            } else {
              a += 1.0;
              b -= 1.0;
            }
          }
        }
        if (b == 0.0) continue;
        const double c = (cls.lambda - a) / b;
        if (c <= 1e-12 || c >= 1.0 - 1e-12) continue;
        std::vector<double> lv = levels;
        lv[sf] = c;
        emit(lv, seg_end);
      }
    }
  }
}

}  // namespace

std::vector<RuleDescription> enumerate_candidates(const PolicyClass& cls,
                                                  const Mat& xs) {
  cls.validate(static_cast<int>(xs.cols()));
  const int n = static_cast<int>(xs.rows());
  std::vector<RuleDescription> out;

  switch (cls.variant) {
    case PolicyClass::Variant::ConstantThreshold: {
      std::vector<double> vals(n);
      for (int i = 0; i < n; ++i) vals[i] = xs(i, 0);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (bool geq : {true, false}) {
        out.push_back({ThresholdRule{-kInf, geq}, 0.0});
        for (double v : vals) out.push_back({ThresholdRule{v, geq}, 0.0});
        out.push_back({ThresholdRule{kInf, geq}, 0.0});
      }
      break;
    }
    case PolicyClass::Variant::LinearThreshold: {
      LinearOptimizer opt(xs);
      opt.enumerate_into(out);
      break;
    }
    case PolicyClass::Variant::BoundedVariation:
      bv_vertices(cls, xs, out);
      break;
    case PolicyClass::Variant::Tree: {
      if (n > 400)
        throw ValidationError(
            "tree candidate enumeration is limited to n <= 400");
      // enumerate distinct achievable labelings recursively
      TreeOptimizer opt(xs, cls.tree_depth, cls.tree_quantiles);
      const auto splits = tree_split_candidates(xs, cls.tree_quantiles);
      std::function<std::vector<std::vector<bool>>(const std::vector<int>&, int)>
          labelings = [&](const std::vector<int>& cell,
                          int depth) -> std::vector<std::vector<bool>> {
        std::vector<std::vector<bool>> res;
        std::vector<bool> zero(n, false), one(n, false);
        for (int i : cell) one[i] = true;
        res.push_back(zero);
        res.push_back(one);
        if (depth == 0 || cell.empty()) return res;
        for (int j = 0; j < xs.cols(); ++j)
          for (double t : splits[j]) {
            std::vector<int> left, right;
            for (int i : cell) (xs(i, j) <= t ? left : right).push_back(i);
            if (left.empty() || right.empty()) continue;
            const auto ls = labelings(left, depth - 1);
            const auto rs = labelings(right, depth - 1);
            for (const auto& l : ls)
              for (const auto& r : rs) {
                std::vector<bool> m(n, false);
                for (int i = 0; i < n; ++i) m[i] = l[i] || r[i];
                res.push_back(std::move(m));
              }
          }
        std::sort(res.begin(), res.end());
        res.erase(std::unique(res.begin(), res.end()), res.end());
        return res;
      };
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      // realize each labeling as a rule by re-optimizing indicator weights
      for (const auto& lab : labelings(all, cls.tree_depth)) {
        Vec w(n);
        for (int i = 0; i < n; ++i) w[i] = lab[i] ? 1.0 : -1.0;
        out.push_back(opt.maximize(w));
      }
      break;
    }
  }
  return out;
}

}  // namespace hte
