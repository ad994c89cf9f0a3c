#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hte/data.hpp"

namespace hte {

// Dense-basis primal simplex for
//     max c'x  s.t.  A x = rhs,  0 <= x <= ub,
// with sparse columns and all variables bounded. The caller supplies a
// primal-feasible starting basis; re-solving with a new objective keeps the
// previous basis (warm start), which stays primal feasible because the
// constraints do not change.
class BoundedSimplex {
 public:
  using SparseCol = std::vector<std::pair<int, double>>;

  void set_problem(int m, std::vector<SparseCol> cols, Vec rhs, Vec ub,
                   std::vector<int> initial_basis);

  // Returns the optimal objective value; solution available via x().
  double solve(const Vec& c);

  Vec x() const;
  int iterations_last() const { return iters_; }

 private:
  void refactorize();
  void compute_basic_values();

  int m_ = 0, n_ = 0;
  std::vector<SparseCol> cols_;
  Vec rhs_, ub_;
  std::vector<int> basis_;
  std::vector<int> pos_in_basis_;        // -1 if nonbasic
  std::vector<std::uint8_t> at_upper_;   // nonbasic rest status
  Mat binv_;
  Vec xb_;
  Vec c_;
  int iters_ = 0;
  bool have_state_ = false;
};

}  // namespace hte
