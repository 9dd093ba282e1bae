#include "pathprice/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

namespace pathprice {

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

LpSolution solve_bounded_lp(const BoundedLp& lp, const SimplexOptions& options) {
  using SpMat = Eigen::SparseMatrix<double>;
  const SpMat& A = lp.A;
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const double tol = options.tolerance;
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 50 * (m + n) + 1000;

  LpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);

  // Slack j = n + i is the unit column e_i with no upper bound.
  std::vector<VarState> state(static_cast<std::size_t>(n + m), VarState::AtLower);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    basis[i] = n + i;
    state[n + i] = VarState::Basic;
  }
  // No rows: every positive-cost column goes to its upper bound.
  if (m == 0) {
    for (int j = 0; j < n; ++j)
      if (lp.c[j] > 0.0) sol.x[j] = 1.0;
    sol.objective = lp.c.dot(sol.x);
    sol.dual_bound = sol.objective;
    return sol;
  }

  Eigen::MatrixXd Binv = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd xB(m);

  auto cost_of = [&](int j) { return j < n ? lp.c[j] : 0.0; };
  auto upper_of = [&](int j) { return j < n ? 1.0 : kInf; };

  auto recompute_xb = [&]() {
    Eigen::VectorXd rhs = lp.b;
    for (int j = 0; j < n; ++j)
      if (state[j] == VarState::AtUpper)
        for (SpMat::InnerIterator it(A, j); it; ++it) rhs[it.row()] -= it.value();
    xB = Binv * rhs;
  };

  auto refactor = [&]() -> bool {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      const int j = basis[i];
      if (j >= n) {
        B(j - n, i) = 1.0;
      } else {
        for (SpMat::InnerIterator it(A, j); it; ++it) B(it.row(), i) = it.value();
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Binv = lu.inverse();
    if (!Binv.allFinite()) return false;
    recompute_xb();
    return true;
  };

  recompute_xb();

  Eigen::VectorXd cB(m), y(m), alpha(m);
  bool bland = false;
  int stall = 0;
  int iter = 0;
  for (;; ++iter) {
    if (iter >= max_iter) {
      sol.status = LpStatus::IterationLimit;
      break;
    }
    if (iter > 0 && iter % options.refactor_every == 0 && !refactor()) {
      sol.status = LpStatus::NumericalFailure;
      break;
    }

    for (int i = 0; i < m; ++i) cB[i] = cost_of(basis[i]);
    y.noalias() = Binv.transpose() * cB;

    // Pricing.
    int q = -1;
    double dq = 0.0;
    double best = 0.0;
    for (int j = 0; j < n + m; ++j) {
      if (state[j] == VarState::Basic) continue;
      double d;
      if (j < n) {
        d = lp.c[j];
        for (SpMat::InnerIterator it(A, j); it; ++it) d -= y[it.row()] * it.value();
      } else {
        d = -y[j - n];
      }
      const bool eligible = (state[j] == VarState::AtLower && d > tol) || (state[j] == VarState::AtUpper && d < -tol);
      if (!eligible) continue;
      if (bland) {
        q = j;
        dq = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
        dq = d;
      }
    }
    if (q < 0) break;  // optimal

    const double sigma = state[q] == VarState::AtLower ? 1.0 : -1.0;
    if (q < n) {
      alpha.setZero();
      for (SpMat::InnerIterator it(A, q); it; ++it) alpha.noalias() += Binv.col(it.row()) * it.value();
    } else {
      alpha = Binv.col(q - n);
    }

    // Ratio test; x_B moves by -t * sigma * alpha.
    double t = upper_of(q);
    int r = -1;
    bool leave_upper = false;
    double pivot_mag = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = sigma * alpha[i];
      double lim;
      bool to_upper;
      if (a > tol) {
        lim = std::max(xB[i], 0.0) / a;
        to_upper = false;
      } else if (a < -tol && basis[i] < n) {
        lim = std::max(1.0 - xB[i], 0.0) / (-a);
        to_upper = true;
      } else {
        continue;
      }
      bool take = lim < t - tol * 1e-3;
      if (!take && std::abs(lim - t) <= tol * 1e-3 && r >= 0) {
        take = bland ? basis[i] < basis[r] : std::abs(a) > pivot_mag;
      }
      if (take) {
        t = lim;
        r = i;
        leave_upper = to_upper;
        pivot_mag = std::abs(a);
      }
    }
    if (!std::isfinite(t)) {
      sol.status = LpStatus::NumericalFailure;
      break;
    }

    xB.noalias() -= (t * sigma) * alpha;
    if (r < 0) {
      state[q] = state[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
    } else {
      const double xq = sigma > 0 ? t : 1.0 - t;
      state[basis[r]] = leave_upper ? VarState::AtUpper : VarState::AtLower;
      basis[r] = q;
      state[q] = VarState::Basic;
      xB[r] = xq;
      const double piv = alpha[r];
      Binv.row(r) /= piv;
      for (int i = 0; i < m; ++i)
        if (i != r && alpha[i] != 0.0) Binv.row(i) -= alpha[i] * Binv.row(r);
    }

    if (t * std::abs(dq) > tol) {
      stall = 0;
      bland = false;
    } else if (++stall >= options.stall_limit) {
      bland = true;
    }
  }
  sol.iterations = iter;

  for (int j = 0; j < n; ++j)
    if (state[j] == VarState::AtUpper) sol.x[j] = 1.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) sol.x[basis[i]] = std::clamp(xB[i], 0.0, 1.0);
  sol.objective = lp.c.dot(sol.x);

  // Lagrangian bound from the final multipliers (clipped to y >= 0): valid for
  // any y, so it survives early termination and round-off.
  for (int i = 0; i < m; ++i) cB[i] = cost_of(basis[i]);
  y.noalias() = Binv.transpose() * cB;
  y = y.cwiseMax(0.0);
  if (y.allFinite()) {
    double bound = y.dot(lp.b);
    for (int j = 0; j < n; ++j) {
      double d = lp.c[j];
      for (SpMat::InnerIterator it(A, j); it; ++it) d -= y[it.row()] * it.value();
      bound += std::max(d, 0.0);
    }
    sol.dual_bound = std::max(bound, sol.objective);
  } else {
    sol.dual_bound = kInf;
  }

  if (sol.status == LpStatus::Optimal) {
    const Eigen::VectorXd lhs = A * sol.x;
    for (int i = 0; i < m; ++i)
      if (lhs[i] > lp.b[i] + 1e-6 * (1.0 + std::abs(lp.b[i]))) sol.status = LpStatus::NumericalFailure;
  }
  return sol;
}

}  // namespace pathprice
