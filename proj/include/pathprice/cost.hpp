#ifndef PATHPRICE_COST_HPP
#define PATHPRICE_COST_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pathprice/cost_model.hpp"
#include "pathprice/mechanism.hpp"

namespace pathprice {

/// Utilization where marginal cost meets the top willingness to pay:
/// f'(rho) = p_bar C, i.e. 1 - (p_bar C)^(-1/2). Throws DomainError if p_bar C <= 1.
double rho_bar(double capacity, double p_bar);

/// Max over y of |sup_{rho on grid} (y rho - f(rho)) - f*(y)|, with the rho
/// grid spaced rho_step on [0, 1).
double conjugate_check(double capacity, const std::vector<double>& y_grid, double rho_step = 1e-5);

/// Numerical solution of the pricing ODE
///   (1 - (C phi)^(-1/2)) phi' = gamma (phi - f'(rho) / C),  phi(0) = 1/C
/// on [0, rho_bar]. Integrated in u = C phi together with the running integral
/// of phi, starting at rho = delta from the local series u = 1 + a rho.
struct BvpSolution {
  double gamma = 0.0;
  double capacity = 0.0;
  double p_bar = 0.0;
  double rho_bar = 0.0;
  double delta = 0.0;
  double step = 0.0;
  Eigen::VectorXd rho;  // ascending; rho[0] = 0
  Eigen::VectorXd phi;  // phi[0] = 1/C
  bool completed = false;  // reached rho_bar without breaking monotonicity
  bool feasible = false;   // completed and phi(rho_bar) >= p_bar
  bool fell_below_marginal = false;  // stopped because phi < f'(rho)/C (so phi(rho_bar) < p_bar)
  double phi_end = 0.0;
  /// max over grid points of f*(C phi)/(gamma C) - (int_0^rho phi - f(rho)/C);
  /// nonpositive when the integral inequality holds everywhere.
  double residual_max = 0.0;
  std::string stop_reason;
};

struct BvpOptions {
  double delta = 1e-5;
  double step = 0.0;  // 0: 1e-5 * rho_bar
};

BvpSolution integrate_bvp(double gamma, double capacity, double p_bar, const BvpOptions& options = {});

struct MinGammaResult {
  double gamma = 0.0;              // smallest feasible gamma found
  double gamma_infeasible = 0.0;   // bracketing infeasible gamma (gamma - tol or below)
  double equality_gamma = 0.0;     // gamma with phi(rho_bar) = p_bar, NaN if none within tol
  double phi_end = 0.0;
  double residual_max = 0.0;
  double delta_sensitivity = 0.0;  // |result(delta) - result(delta / 10)|
  bool converged = false;          // halving the step moves phi(rho_bar) by < 1e-6
  int evaluations = 0;
};

/// Bisection over gamma in [1, hi], hi doubled until feasible (SearchError past 1024).
MinGammaResult min_gamma(double capacity, double p_bar, double tol = 1e-3, const BvpOptions& options = {},
                         bool check_delta = true);

/// Utilization -> price table of a feasible solution, shared by every edge.
/// Throws ValidationError for infeasible solutions.
TabulatedPricing export_pricing_table(const BvpSolution& solution);

void write_bvp_csv(std::ostream& out, const BvpSolution& solution, int stride = 1);

struct MinGammaRow {
  double capacity = 0.0;
  double p_bar = 0.0;
  MinGammaResult result;
};
void write_min_gamma_csv(std::ostream& out, const std::vector<MinGammaRow>& rows);

}  // namespace pathprice

#endif  // PATHPRICE_COST_HPP
