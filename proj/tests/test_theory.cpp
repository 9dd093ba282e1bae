#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pathprice/errors.hpp"
#include "pathprice/theory.hpp"

using namespace pathprice;

namespace {

constexpr double kE = std::numbers::e;
const double kTreeGammaLimit = 2.0 * std::log(3.0);

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
  return g;
}

}  // namespace

TEST(LineUniform, UnitMinLength) {
  for (double g : {0.5, 1.0, 2.0, 6.0}) {
    const double expect = std::max(4 * (kE - 1) * g + 2, 2 * (kE - 1) * g * 50 * 6.0 / (std::exp(g) - 1));
    EXPECT_NEAR(cr_line_uniform(g, 50, 1, 6.0), expect, 1e-9 * expect);
  }
}

TEST(LineUniform, DenominatorFollowsThePricingDerivation) {
  const double g = 2.0;
  const int M = 10, m = 3;
  const double phi_full = std::exp(g) - 1, phi_half = std::exp(g / 2) - 1;
  const double expect = 2 * (kE - 1) * g * M * 6.0 / (phi_full + (2 * m - 2) * phi_half);
  EXPECT_NEAR(cr_line_uniform(g, M, m, 6.0), std::max(expect, 4 * (kE - 1) * g + 2), 1e-9);
}

// The numerator carries a factor gamma too, so the small-gamma limit is finite:
// 2 (e-1) M p_bar / (1 + (m-1)).
TEST(LineUniform, SmallGammaLimit) {
  for (int m : {1, 3}) {
    const double limit = 2 * (kE - 1) * 5 * 6.0 / m;
    EXPECT_NEAR(cr_line_uniform(1e-8, 5, m, 6.0), limit, 1e-6 * limit);
    EXPECT_LT(cr_line_uniform(1e-3, 5, m, 6.0), limit);
  }
}

TEST(LineUniform, InteriorMinimumMovesWithLoad) {
  const auto gammas = grid(0.05, 20.0, 800);
  BoundParams small{5, 5, 1.0};
  BoundParams big{50, 1, 6.0};
  const GammaMinimum a = minimize_over_gamma(BoundFamily::LineUniform, small, gammas);
  const GammaMinimum b = minimize_over_gamma(BoundFamily::LineUniform, big, gammas);
  EXPECT_GT(a.gamma, gammas.front());
  EXPECT_LT(b.gamma, gammas.back());
  EXPECT_GT(b.gamma, a.gamma);
}

TEST(LineUniform, MonotoneInParameters) {
  for (double g : {0.5, 1.0, 2.0, 4.0, 8.0})
    for (int M = 1; M <= 20; ++M)
      for (int m = 1; m <= M; ++m) {
        const double v = cr_line_uniform(g, M, m, 6.0);
        EXPECT_GE(v, 1.0);
        if (m < M) EXPECT_LE(cr_line_uniform(g, M, m + 1, 6.0), v + 1e-12);
        EXPECT_GE(cr_line_uniform(g, M + 1, m, 6.0), v - 1e-12);
        EXPECT_GE(cr_line_uniform(g, M, m, 7.0), v - 1e-12);
      }
}

TEST(LineHetero, UnitBetaAtUnitMinLength) {
  for (double g : {0.5, 2.0, 5.0}) EXPECT_DOUBLE_EQ(cr_line_hetero(g, 30, 1, 6.0, 1.0), cr_line_uniform(g, 30, 1, 6.0));
  // Within a bounded factor for m > 1.
  for (int m = 2; m <= 10; ++m) {
    const double r = cr_line_hetero(2.0, 20, m, 6.0, 1.0) / cr_line_uniform(2.0, 20, m, 6.0);
    EXPECT_GT(r, 0.25);
    EXPECT_LT(r, 4.0);
  }
}

TEST(LineHetero, LargeBetaLimit) {
  // 2 (m-1) beta (e^(g/(2 beta)) - 1) -> (m-1) g as beta grows.
  const double g = 3.0;
  const int M = 40, m = 4;
  const double K = 2 * (kE - 1) * g * M * 6.0;
  const double limit = std::max(4 * (kE - 1) * g + 2, K / (std::exp(g) - 1 + (m - 1) * g));
  EXPECT_NEAR(cr_line_hetero(g, M, m, 6.0, 1e9), limit, 1e-6 * limit);
  const double at_unit_m = cr_line_hetero(g, M, 1, 6.0, 1e9);
  EXPECT_NEAR(at_unit_m, std::max(4 * (kE - 1) * g + 2, K / (std::exp(g) - 1)), 1e-9);
}

TEST(LineHetero, NonIncreasingInMinLength) {
  for (double beta : {1.0, 2.0, 16.0})
    for (double g : {0.5, 2.0, 6.0})
      for (int m = 1; m < 30; ++m)
        EXPECT_LE(cr_line_hetero(g, 30, m + 1, 6.0, beta), cr_line_hetero(g, 30, m, 6.0, beta) + 1e-12);
}

TEST(TreeSR, UnitMinLengthMatchesLine) {
  for (double g : {0.5, 2.0, 7.0})
    EXPECT_DOUBLE_EQ(cr_tree_sr(g, 8, 1, 6.0, TreeProfile::Uniform), cr_line_uniform(g, 8, 1, 6.0));
}

// The two grid claims for trees hold for gamma up to 2 ln 3; beyond that the
// m = 1 -> 2 step can increase the uniform bound (e^g - 1 > 4 (e^(g/2) - 1)).
TEST(TreeSR, ClaimsHoldUpToTwoLnThree) {
  for (double g : {0.25, 0.5, 1.0, 1.5, 2.0, kTreeGammaLimit})
    for (int M = 1; M <= 8; ++M)
      for (int m = 1; m <= M; ++m) {
        const double u = cr_tree_sr(g, M, m, 6.0, TreeProfile::Uniform);
        EXPECT_GE(cr_tree_sr(g, M, m, 6.0, TreeProfile::ExpDecay), u - 1e-12) << g << ' ' << M << ' ' << m;
        if (m < M) EXPECT_LE(cr_tree_sr(g, M, m + 1, 6.0, TreeProfile::Uniform), u + 1e-12);
      }
}

TEST(TreeSR, CounterexampleAboveTwoLnThree) {
  const double g = 2.5;
  EXPECT_GT(cr_tree_sr(g, 4, 2, 6.0, TreeProfile::Uniform), cr_tree_sr(g, 4, 2, 6.0, TreeProfile::ExpDecay));
  EXPECT_GT(cr_tree_sr(g, 4, 2, 6.0, TreeProfile::Uniform), cr_tree_sr(g, 4, 1, 6.0, TreeProfile::Uniform));
}

TEST(TreeSR, LevelRangeBelowMIsNoLarger) {
  for (double g : {0.5, 2.0, 4.0})
    for (int m = 1; m <= 8; ++m)
      EXPECT_LE(cr_tree_sr(g, 8, m, 6.0, TreeProfile::ExpDecay, LevelRange::ZeroToMMinusOne),
                cr_tree_sr(g, 8, m, 6.0, TreeProfile::ExpDecay, LevelRange::ZeroToM) + 1e-12);
}

TEST(TreeEL, SingleLengthCollapses) {
  for (double g : {0.5, 2.0})
    for (int M = 1; M <= 8; ++M)
      EXPECT_DOUBLE_EQ(cr_tree_el(g, M, M, 6.0, TreeProfile::Uniform), cr_tree_sr(g, M, M, 6.0, TreeProfile::Uniform));
}

TEST(TreeEL, ExpDecayAttainedAtShortest) {
  const double g = 2.0;
  for (int m = 1; m <= 8; ++m) {
    const double K = 2 * (kE - 1) * g * 8 * 6.0;
    EXPECT_NEAR(cr_tree_el(g, 8, m, 6.0, TreeProfile::ExpDecay),
                std::max(4 * (kE - 1) * g + 2, K / (m * (std::exp(g) - 1))), 1e-9);
  }
  // Same curve as the line at m = 1.
  for (double gg : {0.5, 2.0, 8.0})
    EXPECT_DOUBLE_EQ(cr_tree_el(gg, 50, 1, 6.0, TreeProfile::ExpDecay), cr_line_uniform(gg, 50, 1, 6.0));
}

TEST(GammaOpt, ClosedForm) {
  EXPECT_NEAR(gamma_opt_line(50, 1, 6.0), 12.494, 1e-3);
  EXPECT_DOUBLE_EQ(gamma_opt_line(3, 3, 1.0), 2.0);
  EXPECT_NEAR(gamma_opt_line(2000000, 1, 6.0) - gamma_opt_line(1000000, 1, 6.0), 2 * std::log(2.0), 1e-6);
}

TEST(Families, AllAtLeastOneAndDeterministic) {
  for (BoundFamily f : {BoundFamily::LineUniform, BoundFamily::LineHetero, BoundFamily::TreeSRUniform,
                        BoundFamily::TreeSRExpDecay, BoundFamily::TreeELUniform, BoundFamily::TreeELExpDecay}) {
    EXPECT_EQ(bound_family_from_string(to_string(f)), f);
    for (double g : {0.1, 1.0, 10.0})
      for (int m = 1; m <= 8; ++m) {
        BoundParams p{8, m, 6.0, 2.0, g};
        const double v = evaluate_bound(f, p);
        EXPECT_GE(v, 1.0);
        EXPECT_GE(v, 4 * (kE - 1) * g + 2 - 1e-12);
        EXPECT_EQ(v, evaluate_bound(f, p));
      }
  }
  EXPECT_THROW(bound_family_from_string("ring"), ValidationError);
}

TEST(Families, ParameterChecks) {
  EXPECT_THROW(evaluate_bound(BoundFamily::LineUniform, BoundParams{2, 3, 6.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(evaluate_bound(BoundFamily::LineUniform, BoundParams{2, 0, 6.0, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(evaluate_bound(BoundFamily::LineUniform, BoundParams{2, 1, 0.5, 1.0, 1.0}), ValidationError);
  EXPECT_THROW(evaluate_bound(BoundFamily::LineHetero, BoundParams{2, 1, 6.0, 0.5, 1.0}), ValidationError);
  EXPECT_THROW(evaluate_bound(BoundFamily::LineUniform, BoundParams{2, 1, 6.0, 1.0, 0.0}), ValidationError);
}

TEST(Families, CurveCsv) {
  std::ostringstream out;
  write_bound_curve_csv(out, BoundFamily::LineUniform, BoundParams{10, 1, 6.0}, {1.0, 2.0});
  std::istringstream in(out.str());
  std::string header, row1, row2, extra;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "family,M,m,p_bar,beta,gamma,bound");
  EXPECT_EQ(row1.substr(0, 13), "line_uniform,");
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(Templates, WorkForLongDouble) {
  const long double a = cr_line_uniform<long double>(2.0L, 20, 2, 6.0L);
  EXPECT_NEAR(static_cast<double>(a), cr_line_uniform(2.0, 20, 2, 6.0), 1e-12);
}
