#include "hte/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hte {

namespace {
constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-9;
}  // namespace

void BoundedSimplex::set_problem(int m, std::vector<SparseCol> cols, Vec rhs,
                                 Vec ub, std::vector<int> initial_basis) {
  m_ = m;
  n_ = static_cast<int>(cols.size());
  cols_ = std::move(cols);
  rhs_ = std::move(rhs);
  ub_ = std::move(ub);
  basis_ = std::move(initial_basis);
  if (static_cast<int>(basis_.size()) != m_)
    throw std::invalid_argument("initial basis size must equal row count");
  pos_in_basis_.assign(n_, -1);
  for (int r = 0; r < m_; ++r) pos_in_basis_[basis_[r]] = r;
  at_upper_.assign(n_, 0);
  refactorize();
  compute_basic_values();
  have_state_ = true;
}

void BoundedSimplex::refactorize() {
  Mat b = Mat::Zero(m_, m_);
  for (int r = 0; r < m_; ++r)
    for (const auto& [row, val] : cols_[basis_[r]]) b(row, r) = val;
  Eigen::PartialPivLU<Mat> lu(b);
  binv_ = lu.inverse();
}

void BoundedSimplex::compute_basic_values() {
  Vec adjusted = rhs_;
  for (int j = 0; j < n_; ++j) {
    if (pos_in_basis_[j] >= 0 || !at_upper_[j]) continue;
    for (const auto& [row, val] : cols_[j]) adjusted[row] -= val * ub_[j];
  }
  xb_ = binv_ * adjusted;
  // snap fp dust onto the bounds
  for (int r = 0; r < m_; ++r) {
    const double u = ub_[basis_[r]];
    if (xb_[r] < 0.0 && xb_[r] > -kFeasTol) xb_[r] = 0.0;
    if (xb_[r] > u && xb_[r] < u + kFeasTol) xb_[r] = u;
  }
}

double BoundedSimplex::solve(const Vec& c) {
  if (!have_state_) throw std::logic_error("set_problem not called");
  if (c.size() != n_) throw std::invalid_argument("objective size mismatch");
  c_ = c;
  compute_basic_values();
  for (int r = 0; r < m_; ++r) {
    if (xb_[r] < -kFeasTol || xb_[r] > ub_[basis_[r]] + kFeasTol) {
      // warm basis lost feasibility (should not happen with fixed rhs):
      // nothing to recover from generically, so reset is on the caller
      throw std::runtime_error("simplex: infeasible warm-start basis");
    }
  }

  iters_ = 0;
  const int max_iters = 200 * (m_ + 2);
  int degenerate_run = 0;
  bool bland = false;

  Vec cb(m_);
  for (;;) {
    if (++iters_ > max_iters)
      throw std::runtime_error("simplex: iteration limit reached");
    if (iters_ % 128 == 0) {
      refactorize();
      compute_basic_values();
    }

    for (int r = 0; r < m_; ++r) cb[r] = c_[basis_[r]];
    const Vec y = binv_.transpose() * cb;

    // pricing
    int enter = -1;
    double best = bland ? 0.0 : kCostTol;
    for (int j = 0; j < n_; ++j) {
      if (pos_in_basis_[j] >= 0) continue;
      double d = c_[j];
      for (const auto& [row, val] : cols_[j]) d -= y[row] * val;
      const double viol = at_upper_[j] ? -d : d;
      if (bland) {
        if (viol > kCostTol) {
          enter = j;
          break;
        }
      } else if (viol > best) {
        best = viol;
        enter = j;
      }
    }
    if (enter < 0) break;  // optimal

    // direction of change of basics when entering moves by +1 from its bound
    Vec w = Vec::Zero(m_);
    for (const auto& [row, val] : cols_[enter]) w += val * binv_.col(row);
    const double dir = at_upper_[enter] ? -1.0 : 1.0;

    // ratio test: smallest step, ties resolved toward the largest pivot
    // (smallest variable index under Bland's rule)
    double tmax = ub_[enter];
    int leave = -1;
    bool leave_at_upper = false;
    auto step_of = [&](int r, double g, bool* hits_upper) {
      if (g > kPivotTol) {
        *hits_upper = false;
        return std::max(xb_[r] / g, 0.0);
      }
      *hits_upper = true;
      return std::max((ub_[basis_[r]] - xb_[r]) / (-g), 0.0);
    };
    for (int r = 0; r < m_; ++r) {
      const double g = dir * w[r];
      if (std::abs(g) <= kPivotTol) continue;
      bool hu;
      const double t = step_of(r, g, &hu);
      if (t < tmax - 1e-12) {
        tmax = t;
        leave = r;
        leave_at_upper = hu;
      } else if (leave >= 0 && t <= tmax + 1e-12) {
        const bool prefer =
            bland ? basis_[r] < basis_[leave]
                  : std::abs(g) > std::abs(dir * w[leave]);
        if (prefer) {
          leave = r;
          leave_at_upper = hu;
        }
      }
    }

    if (tmax < 1e-12) {
      if (++degenerate_run > 40) bland = true;
    } else {
      degenerate_run = 0;
    }

    if (leave < 0) {
      // entering variable runs to its other bound; basis unchanged
      for (int r = 0; r < m_; ++r) xb_[r] -= dir * tmax * w[r];
      at_upper_[enter] = at_upper_[enter] ? 0 : 1;
      continue;
    }

    // pivot
    const double enter_value = at_upper_[enter] ? ub_[enter] - tmax : tmax;
    for (int r = 0; r < m_; ++r) xb_[r] -= dir * tmax * w[r];
    const int leaving_var = basis_[leave];
    at_upper_[leaving_var] = leave_at_upper ? 1 : 0;
    pos_in_basis_[leaving_var] = -1;
    basis_[leave] = enter;
    pos_in_basis_[enter] = leave;
    at_upper_[enter] = 0;
    xb_[leave] = enter_value;

    const double piv = w[leave];
    if (std::abs(piv) < kPivotTol) {
      refactorize();
      compute_basic_values();
      continue;
    }
    binv_.row(leave) /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      const double f = w[r];
      if (f != 0.0) binv_.row(r) -= f * binv_.row(leave);
    }
  }

  double obj = 0.0;
  for (int r = 0; r < m_; ++r) obj += c_[basis_[r]] * xb_[r];
  for (int j = 0; j < n_; ++j)
    if (pos_in_basis_[j] < 0 && at_upper_[j]) obj += c_[j] * ub_[j];
  return obj;
}

Vec BoundedSimplex::x() const {
  Vec out = Vec::Zero(n_);
  for (int j = 0; j < n_; ++j)
    if (pos_in_basis_[j] < 0 && at_upper_[j]) out[j] = ub_[j];
  for (int r = 0; r < m_; ++r)
    out[basis_[r]] = std::clamp(xb_[r], 0.0, ub_[basis_[r]]);
  return out;
}

}  // namespace hte
