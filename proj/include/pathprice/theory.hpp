#ifndef PATHPRICE_THEORY_HPP
#define PATHPRICE_THEORY_HPP

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

namespace pathprice {

// Competitive-ratio upper bounds for the exponential pricing rule. Each is the
// max of a saturation branch 4(e-1)gamma + 2 and a topology-dependent branch
// K / D with K = 2(e-1) gamma M p_bar.

namespace bound_detail {
template <typename Scalar>
Scalar saturation_branch(Scalar gamma) {
  return Scalar(4) * (std::numbers::e_v<Scalar> - Scalar(1)) * gamma + Scalar(2);
}
template <typename Scalar>
Scalar numerator(Scalar gamma, int M, Scalar p_bar) {
  return Scalar(2) * (std::numbers::e_v<Scalar> - Scalar(1)) * gamma * Scalar(M) * p_bar;
}
// x 2^(x-1) (e^(gamma/2^(x-1)) - 1)
template <typename Scalar>
Scalar halving_denominator(Scalar gamma, int x) {
  const Scalar h = std::ldexp(Scalar(1), x - 1);
  return Scalar(x) * h * std::expm1(gamma / h);
}
}  // namespace bound_detail

/// Line, identical capacities. Denominator phi(C) + (2m-2) phi(C/2).
template <typename Scalar>
Scalar cr_line_uniform(Scalar gamma, int M, int m, Scalar p_bar) {
  using namespace bound_detail;
  const Scalar denom = std::expm1(gamma) + Scalar(2 * m - 2) * std::expm1(gamma / Scalar(2));
  return std::max(saturation_branch(gamma), numerator(gamma, M, p_bar) / denom);
}

/// Line, capacities within a factor beta of each other.
template <typename Scalar>
Scalar cr_line_hetero(Scalar gamma, int M, int m, Scalar p_bar, Scalar beta) {
  using namespace bound_detail;
  const Scalar denom =
      std::expm1(gamma) + Scalar(2) * Scalar(m - 1) * beta * std::expm1(gamma / (Scalar(2) * beta));
  return std::max(saturation_branch(gamma), numerator(gamma, M, p_bar) / denom);
}

enum class TreeProfile { Uniform, ExpDecay };

/// Which saturated levels the exponentially decaying source-rooted bound
/// maximizes over: 0..m (the per-level argument) or 0..m-1 (the stated form).
enum class LevelRange { ZeroToM, ZeroToMMinusOne };

template <typename Scalar>
Scalar cr_tree_sr(Scalar gamma, int M, int m, Scalar p_bar, TreeProfile profile,
                  LevelRange range = LevelRange::ZeroToM) {
  using namespace bound_detail;
  const Scalar K = numerator(gamma, M, p_bar);
  if (profile == TreeProfile::Uniform)
    return std::max(saturation_branch(gamma), K / halving_denominator(gamma, m));
  const int top = range == LevelRange::ZeroToM ? m : m - 1;
  Scalar worst = Scalar(0);
  for (int l = 0; l <= top; ++l) {
    const Scalar h = std::ldexp(Scalar(1), l);
    const Scalar d = std::max(Scalar(l) * h * std::expm1(gamma / h), Scalar(m - l + 1) * std::expm1(gamma));
    worst = std::max(worst, K / d);
  }
  return std::max(saturation_branch(gamma), worst);
}

/// Leaf-ending requests; x ranges over the possible path lengths m..M.
template <typename Scalar>
Scalar cr_tree_el(Scalar gamma, int M, int m, Scalar p_bar, TreeProfile profile) {
  using namespace bound_detail;
  const Scalar K = numerator(gamma, M, p_bar);
  Scalar worst = saturation_branch(gamma);
  for (int x = m; x <= M; ++x) {
    const Scalar d = profile == TreeProfile::Uniform ? halving_denominator(gamma, x)
                                                     : Scalar(x) * std::expm1(gamma);
    worst = std::max(worst, K / d);
  }
  return worst;
}

/// 2 ln((e-1) M p_bar / m + 1)
template <typename Scalar>
Scalar gamma_opt_line(int M, int m, Scalar p_bar) {
  return Scalar(2) * std::log((std::numbers::e_v<Scalar> - Scalar(1)) * Scalar(M) * p_bar / Scalar(m) + Scalar(1));
}

enum class BoundFamily { LineUniform, LineHetero, TreeSRUniform, TreeSRExpDecay, TreeELUniform, TreeELExpDecay };

std::string to_string(BoundFamily f);
BoundFamily bound_family_from_string(const std::string& name);

struct BoundParams {
  int M = 1;
  int m = 1;
  double p_bar = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  LevelRange level_range = LevelRange::ZeroToM;
};

/// Throws ValidationError unless M >= m >= 1, p_bar >= 1, beta >= 1, gamma > 0.
void check_bound_params(const BoundParams& p);

double evaluate_bound(BoundFamily family, const BoundParams& p);

/// Rows of (family, M, m, p_bar, beta, gamma, bound) for every gamma in the grid.
void write_bound_curve_csv(std::ostream& out, BoundFamily family, const BoundParams& base,
                           const std::vector<double>& gammas);

/// Grid minimizer of a family's bound over gamma.
struct GammaMinimum {
  double gamma = 0.0;
  double bound = 0.0;
};
GammaMinimum minimize_over_gamma(BoundFamily family, const BoundParams& base, const std::vector<double>& gammas);

}  // namespace pathprice

#endif  // PATHPRICE_THEORY_HPP
