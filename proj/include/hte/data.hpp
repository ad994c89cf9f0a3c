#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hte {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Input/contract violations (bad files, bad config). Mapped to exit code 2
// by the CLI; everything else is a runtime failure (exit 3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable dataset: covariates, binary treatment, outcome, and the selected
// effect-modifier column indices (0-based). Safe to share across threads.
struct Sample {
  Mat x;               // n x p
  Eigen::VectorXi a;   // in {0,1}
  Vec y;
  std::vector<int> s;  // effect-modifier columns, 0-based, nonempty

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(x.cols()); }

  // n x |s| view of the effect modifiers
  Mat xs() const {
    Mat out(n(), static_cast<int>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) out.col(j) = x.col(s[j]);
    return out;
  }

  void validate() const;
};

// Qualitative-effect threshold; must be nonnegative.
struct Delta {
  double value = 0.0;
  Delta() = default;
  explicit Delta(double v) : value(v) {
    if (!(v >= 0.0)) throw ValidationError("delta must be >= 0");
  }
};

// CSV with header `y,a,x1,...,xp`. Modifier columns are given by name
// ("x3") and resolved against the header.
Sample load_csv(const std::string& path,
                const std::vector<std::string>& modifier_columns);

void write_csv(const Sample& sample, const std::string& path);

// Deterministic partition of {0..n-1} into k folds (eval sets differ in size
// by at most one). Returns (train, eval) index pairs.
std::vector<std::pair<std::vector<int>, std::vector<int>>> split_folds(
    int n, int k, std::uint64_t seed);

}  // namespace hte
