#ifndef PATHPRICE_SIMPLEX_HPP
#define PATHPRICE_SIMPLEX_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace pathprice {

/// max c'x  s.t.  A x <= b,  0 <= x <= 1,  with b >= 0.
/// The all-zero point is feasible, so no phase one is needed.
struct BoundedLp {
  Eigen::SparseMatrix<double> A;  // rows x cols, column major
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

enum class LpStatus { Optimal, IterationLimit, NumericalFailure };

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  /// y'b + sum_j max(0, c_j - y'A_j) for the final multipliers y >= 0; an
  /// upper bound on the LP optimum even when the solve stops early.
  double dual_bound = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

struct SimplexOptions {
  double tolerance = 1e-9;
  int refactor_every = 64;
  int stall_limit = 50;      // non-improving pivots before switching to Bland's rule
  int max_iterations = 0;    // 0: 50 * (rows + cols) + 1000
};

/// Bounded-variable revised primal simplex with a dense basis inverse.
LpSolution solve_bounded_lp(const BoundedLp& lp, const SimplexOptions& options = {});

}  // namespace pathprice

#endif  // PATHPRICE_SIMPLEX_HPP
