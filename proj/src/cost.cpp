#include "pathprice/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pathprice/errors.hpp"

namespace pathprice {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGammaCap = 1024.0;

}  // namespace

double rho_bar(double capacity, double p_bar) {
  const double y = p_bar * capacity;
  if (!(y > 1.0)) throw DomainError("p_bar * capacity must exceed 1");
  return 1.0 - 1.0 / std::sqrt(y);
}

double conjugate_check(double capacity, const std::vector<double>& y_grid, double rho_step) {
  if (!(capacity > 0.0)) throw ValidationError("capacity must be positive");
  if (!(rho_step > 0.0 && rho_step < 1.0)) throw ValidationError("rho_step must lie in (0, 1)");
  const auto points = static_cast<long>(std::ceil(1.0 / rho_step));
  double worst = 0.0;
  for (double y : y_grid) {
    double sup = 0.0;  // rho = 0
    for (long k = 1; k < points; ++k) {
      const double rho = static_cast<double>(k) * rho_step;
      if (rho >= 1.0) break;
      sup = std::max(sup, y * rho - mm1::cost(rho));
    }
    worst = std::max(worst, std::abs(sup - mm1::conjugate(y)));
  }
  return worst;
}

BvpSolution integrate_bvp(double gamma, double capacity, double p_bar, const BvpOptions& options) {
  if (!(gamma >= 1.0)) throw ValidationError("gamma must be at least 1");
  if (!(capacity > 0.0)) throw ValidationError("capacity must be positive");
  if (!(options.delta > 0.0)) throw ValidationError("delta must be positive");
  if (options.step < 0.0 || std::isnan(options.step)) throw ValidationError("step must be positive");

  BvpSolution sol;
  sol.gamma = gamma;
  sol.capacity = capacity;
  sol.p_bar = p_bar;
  sol.rho_bar = rho_bar(capacity, p_bar);
  sol.delta = options.delta;
  if (!(options.delta < sol.rho_bar)) throw ValidationError("delta must be below rho_bar");
  const double C = capacity;
  const double rb = sol.rho_bar;
  const auto n = static_cast<long>(std::ceil((rb - options.delta) / (options.step > 0.0 ? options.step : 1e-5 * rb)));
  const double h = (rb - options.delta) / static_cast<double>(n);
  sol.step = h;

  // State (u, I): u = C phi, I = int_0^rho phi.
  auto rhs = [&](double rho, const Eigen::Vector2d& s) -> Eigen::Vector2d {
    const double u = s[0];
    if (!(u > 1.0)) return Eigen::Vector2d::Constant(kNaN);
    const double den = 1.0 - 1.0 / std::sqrt(u);
    return {gamma * (u - mm1::marginal_cost(rho)) / den, u / C};
  };
  auto residual = [&](double rho, const Eigen::Vector2d& s) {
    return mm1::conjugate(s[0]) / (gamma * C) - (s[1] - mm1::cost(rho) / C);
  };

  const double a = gamma + std::sqrt(std::max(gamma * gamma - 4.0 * gamma, 0.0));
  const double d0 = options.delta;
  Eigen::Vector2d s(1.0 + a * d0, d0 * (1.0 + 0.5 * a * d0) / C);

  std::vector<double> rho{0.0, d0};
  std::vector<double> phi{1.0 / C, s[0] / C};
  rho.reserve(static_cast<std::size_t>(n) + 2);
  phi.reserve(static_cast<std::size_t>(n) + 2);
  sol.residual_max = std::max(0.0, residual(d0, s));

  sol.completed = true;
  for (long k = 0; k < n; ++k) {
    const double r0 = d0 + static_cast<double>(k) * h;
    const double r1 = k + 1 == n ? rb : d0 + static_cast<double>(k + 1) * h;
    const double hk = r1 - r0;
    const Eigen::Vector2d k1 = rhs(r0, s);
    const Eigen::Vector2d k2 = rhs(r0 + 0.5 * hk, s + 0.5 * hk * k1);
    const Eigen::Vector2d k3 = rhs(r0 + 0.5 * hk, s + 0.5 * hk * k2);
    const Eigen::Vector2d k4 = rhs(r1, s + hk * k3);
    s += hk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.allFinite() || !(s[0] > 1.0)) {
      sol.completed = false;
      sol.stop_reason = "denominator reached zero";
      break;
    }
    if (gamma * (s[0] - mm1::marginal_cost(r1)) < 0.0) {
      sol.completed = false;
      sol.fell_below_marginal = true;
      sol.stop_reason = "price started decreasing";
      break;
    }
    rho.push_back(r1);
    phi.push_back(s[0] / C);
    sol.residual_max = std::max(sol.residual_max, residual(r1, s));
  }

  sol.rho = Eigen::Map<Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
  sol.phi = Eigen::Map<Eigen::VectorXd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
  sol.phi_end = phi.back();
  sol.feasible = sol.completed && sol.phi_end >= p_bar;
  if (sol.completed) sol.stop_reason = sol.feasible ? "feasible" : "price below p_bar at rho_bar";
  return sol;
}

MinGammaResult min_gamma(double capacity, double p_bar, double tol, const BvpOptions& options, bool check_delta) {
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  MinGammaResult out;
  auto solve = [&](double g) {
    ++out.evaluations;
    return integrate_bvp(g, capacity, p_bar, options);
  };

  double lo = 1.0;
  BvpSolution lo_sol = solve(lo);
  BvpSolution hi_sol;
  double hi;
  if (lo_sol.feasible) {
    hi = lo;
    hi_sol = lo_sol;
    lo = kNaN;
  } else {
    hi = 2.0;
    hi_sol = solve(hi);
    while (!hi_sol.feasible) {
      lo = hi;
      lo_sol = std::move(hi_sol);
      hi *= 2.0;
      if (hi > kGammaCap) throw SearchError("no feasible gamma below " + std::to_string(kGammaCap));
      hi_sol = solve(hi);
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      BvpSolution mid_sol = solve(mid);
      if (mid_sol.feasible) {
        hi = mid;
        hi_sol = std::move(mid_sol);
      } else {
        lo = mid;
        lo_sol = std::move(mid_sol);
      }
    }
  }

  out.gamma = hi;
  out.gamma_infeasible = lo;
  out.phi_end = hi_sol.phi_end;
  out.residual_max = hi_sol.residual_max;
  // phi(rho_bar) is continuous in gamma while the integration completes; a
  // completed infeasible bracket therefore brackets the equality crossing.
  // A bracket that dropped below f'(rho)/C ends under f'(rho_bar)/C = p_bar,
  // so the crossing lies in the same bracket.
  if (std::abs(hi_sol.phi_end - p_bar) <= 1e-9 * p_bar) {
    out.equality_gamma = hi;
  } else if (!std::isnan(lo) && lo_sol.completed) {
    const double w = (p_bar - lo_sol.phi_end) / (hi_sol.phi_end - lo_sol.phi_end);
    out.equality_gamma = lo + w * (hi - lo);
  } else if (!std::isnan(lo) && lo_sol.fell_below_marginal) {
    out.equality_gamma = hi;
  } else {
    out.equality_gamma = kNaN;
  }

  BvpOptions half = options;
  half.step = 0.5 * hi_sol.step;
  const BvpSolution fine = integrate_bvp(hi, capacity, p_bar, half);
  out.converged = fine.completed && std::abs(fine.phi_end - hi_sol.phi_end) < 1e-6;

  if (check_delta) {
    BvpOptions smaller = options;
    smaller.delta = options.delta / 10.0;
    const MinGammaResult again = min_gamma(capacity, p_bar, tol, smaller, false);
    out.delta_sensitivity = std::abs(again.gamma - out.gamma);
    out.evaluations += again.evaluations;
  }
  return out;
}

TabulatedPricing export_pricing_table(const BvpSolution& solution) {
  if (!solution.feasible) throw ValidationError("refusing to export an infeasible pricing solution");
  std::vector<double> rho(solution.rho.data(), solution.rho.data() + solution.rho.size());
  std::vector<double> phi(solution.phi.data(), solution.phi.data() + solution.phi.size());
  phi.front() = 1.0 / solution.capacity;
  TabulatedPricing out;
  out.tables.emplace_back(std::move(rho), std::move(phi));
  out.gamma = solution.gamma;
  return out;
}

void write_bvp_csv(std::ostream& out, const BvpSolution& solution, int stride) {
  stride = std::max(stride, 1);
  out << "rho,phi\n";
  out.precision(15);
  const Eigen::Index last = solution.rho.size() - 1;
  for (Eigen::Index i = 0; i <= last; ++i)
    if (i % stride == 0 || i == last) out << solution.rho[i] << ',' << solution.phi[i] << '\n';
}

void write_min_gamma_csv(std::ostream& out, const std::vector<MinGammaRow>& rows) {
  out << "capacity,p_bar,min_gamma,infeasible_gamma,equality_gamma,phi_end,residual_max,delta_sensitivity,converged\n";
  out.precision(12);
  for (const MinGammaRow& r : rows)
    out << r.capacity << ',' << r.p_bar << ',' << r.result.gamma << ',' << r.result.gamma_infeasible << ','
        << r.result.equality_gamma << ',' << r.result.phi_end << ',' << r.result.residual_max << ','
        << r.result.delta_sensitivity << ',' << (r.result.converged ? 1 : 0) << '\n';
}

}  // namespace pathprice
