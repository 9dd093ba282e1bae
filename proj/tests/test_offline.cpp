#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pathprice/arrivals.hpp"
#include "pathprice/mechanism.hpp"
#include "pathprice/offline.hpp"
#include "pathprice/simplex.hpp"

using namespace pathprice;

namespace {

Request make(const Network& net, int id, NodeId s, NodeId t, double value, double rate) {
  Request r;
  r.id = id;
  r.source = s;
  r.dest = t;
  r.rate = rate;
  r.value = value;
  r.path = path_between(net, s, t);
  return r;
}

struct Case {
  Network net;
  Instance inst;
};

// Small line or tree with tight capacities, integer or fractional values.
Case random_case(std::mt19937_64& rng, int max_requests) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> count(0, max_requests);
  std::uniform_real_distribution<double> cap(1.0, 4.0);
  const bool tree = coin(rng) == 1;
  const bool integral = coin(rng) == 1;
  Network net = tree ? build_tree(3, 2, UniformCapacity{std::round(cap(rng))})
                     : build_line(7, UniformCapacity{integral ? std::round(cap(rng)) : cap(rng)});
  const int n = count(rng);
  Instance inst = tree ? gen_tree_el_stochastic(net, n, 1, 3, 6.0, 1.0, rng())
                       : gen_line_stochastic(net, n, 1, 4, 6.0, 1.0, rng());
  if (integral)
    for (Request& r : inst.requests) r.value = std::round(r.value);
  return {std::move(net), std::move(inst)};
}

double greedy_fractional_knapsack(std::vector<double> v, std::vector<double> w, double cap) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] / w[a] > v[b] / w[b]; });
  double total = 0.0;
  for (auto i : order) {
    const double take = std::min(1.0, cap / w[i]);
    if (take <= 0) break;
    total += take * v[i];
    cap -= take * w[i];
  }
  return total;
}

}  // namespace

TEST(Bruteforce, TwoRequestsOneEdge) {
  const Network net = build_line(2, UniformCapacity{1});
  Instance inst;
  inst.requests = {make(net, 0, 0, 1, 1.0, 1.0), make(net, 1, 0, 1, 2.0, 1.0)};
  const OptResult r = opt_bruteforce(make_packing_problem(net, inst));
  EXPECT_EQ(r.value, 2.0);
  EXPECT_EQ(r.selection, (std::vector<int>{1}));
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.bound_gap, 0.0);
}

TEST(Bruteforce, EmptyAndDisjoint) {
  const Network net = build_line(7, UniformCapacity{1});
  EXPECT_EQ(opt_bruteforce(make_packing_problem(net, Instance{})).value, 0.0);
  EXPECT_TRUE(opt_bruteforce(make_packing_problem(net, Instance{})).selection.empty());
  Instance inst;
  inst.requests = {make(net, 0, 0, 2, 3.0, 1.0), make(net, 1, 2, 4, 5.0, 1.0), make(net, 2, 4, 6, 7.0, 1.0)};
  const OptResult r = opt_bruteforce(make_packing_problem(net, inst));
  EXPECT_EQ(r.value, 15.0);
  EXPECT_EQ(r.selection, (std::vector<int>{0, 1, 2}));
}

TEST(Bruteforce, TiesPickSmallestSelection) {
  const Network net = build_line(2, UniformCapacity{1});
  Instance inst;
  inst.requests = {make(net, 0, 0, 1, 2.0, 1.0), make(net, 1, 0, 1, 2.0, 1.0), make(net, 2, 0, 1, 2.0, 1.0)};
  EXPECT_EQ(opt_bruteforce(make_packing_problem(net, inst)).selection, (std::vector<int>{0}));
}

TEST(Bruteforce, SizeLimit) {
  const Network net = build_line(11, UniformCapacity{100});
  const Instance inst = gen_line_stochastic(net, 23, 1, 5, 6.0, 1.0, 1);
  EXPECT_THROW(opt_bruteforce(make_packing_problem(net, inst)), SizeError);
}

TEST(PackingProblem, DropsInvalidPaths) {
  const Network net = build_line(4, UniformCapacity{1});
  Instance inst;
  inst.requests = {make(net, 0, 0, 2, 2.0, 1.0), make(net, 1, 0, 1, 1.0, 1.0)};
  inst.requests[1].path = Path{{0, 2}};
  const PackingProblem p = make_packing_problem(net, inst);
  EXPECT_EQ(p.request_ids, (std::vector<int>{0}));
  EXPECT_EQ(p.load.nonZeros(), 2);
}

TEST(Bnb, EmptyProblem) {
  const Network net = build_line(3, UniformCapacity{1});
  const OptResult r = opt_bnb(make_packing_problem(net, Instance{}));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.exact);
}

TEST(Bnb, IdenticalItemsOnSharedEdge) {
  for (int k : {1, 3, 7}) {
    const Network net = build_line(3, UniformCapacity{static_cast<double>(k)});
    Instance inst;
    for (int i = 0; i < 12; ++i) inst.requests.push_back(make(net, i, 0, 2, 5.0, 1.0));
    const OptResult r = opt_bnb(make_packing_problem(net, inst));
    EXPECT_EQ(r.value, 5.0 * k);
    EXPECT_TRUE(r.exact);
  }
}

TEST(Bnb, MatchesBruteforceOnRandomProblems) {
  std::mt19937_64 rng(424242);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const Case c = random_case(rng, 15);
    const PackingProblem p = make_packing_problem(c.net, c.inst);
    const OptResult brute = opt_bruteforce(p);
    const OptResult bnb = opt_bnb(p, 30.0);
    ASSERT_TRUE(bnb.exact);
    if (bnb.value != brute.value) ++mismatches;
    EXPECT_EQ(bnb.value, brute.value) << "case " << t;
    EXPECT_TRUE(selection_feasible(p, bnb.selection));
    EXPECT_TRUE(selection_feasible(p, brute.selection));
    EXPECT_EQ(selection_value(p, bnb.selection), bnb.value);
    EXPECT_GE(lp_upper_bound(p), bnb.value - 1e-9);
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(Bnb, OptDominatesMechanism) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    const Network net = build_line(21, UniformCapacity{5});
    const Instance inst = gen_line_stochastic(net, 80, 1, 8, 6.0, 1.0, rng());
    const OptResult opt = opt_bnb(make_packing_problem(net, inst), 30.0);
    for (double gamma : {0.5, 2.0, 4.0})
      EXPECT_GE(opt.value, run(net, inst, ExponentialPricing{gamma}).alg_welfare - 1e-9);
  }
}

TEST(Bnb, TimeoutReportsGap) {
  const Network net = build_line(41, UniformCapacity{10});
  const Instance inst = gen_line_stochastic(net, 400, 1, 20, 6.0, 1.0, 5);
  const PackingProblem p = make_packing_problem(net, inst);
  const OptResult r = opt_bnb(p, 1e-6);
  EXPECT_TRUE(selection_feasible(p, r.selection));
  if (!r.exact) {
    EXPECT_GE(r.bound_gap, 0.0);
    EXPECT_GE(lp_upper_bound(p), r.value);
  } else {
    EXPECT_EQ(r.bound_gap, 0.0);
  }
}

TEST(Lp, SingleEdgeMatchesFractionalKnapsack) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Network net = build_line(2, UniformCapacity{3.0});
    Instance inst;
    std::vector<double> v, w;
    for (int i = 0; i < 10; ++i) {
      Request r = make(net, i, 0, 1, 0.0, u(rng));
      r.value = r.rate * (1.0 + 5.0 * u(rng) / 2.0);
      v.push_back(r.value);
      w.push_back(r.rate);
      inst.requests.push_back(r);
    }
    // The LP sees the same relative capacity slack as every other solver.
    EXPECT_NEAR(lp_relaxation(make_packing_problem(net, inst)).value,
                greedy_fractional_knapsack(v, w, 3.0 * (1.0 + kPackingSlack)), 1e-9);
  }
}

TEST(Lp, NoBindingConstraintGivesTotal) {
  const Network net = build_line(5, UniformCapacity{100});
  const Instance inst = gen_line_stochastic(net, 10, 1, 3, 6.0, 1.0, 4);
  double total = 0.0;
  for (const Request& r : inst.requests) total += r.value;
  EXPECT_NEAR(lp_upper_bound(make_packing_problem(net, inst)), total, 1e-9);
}

TEST(Simplex, SmallTextbookProblem) {
  // max 3x + 2y, x + y <= 1.5, x <= 1 (bound), 0 <= y <= 1
  BoundedLp lp;
  lp.A.resize(1, 2);
  lp.A.insert(0, 0) = 1.0;
  lp.A.insert(0, 1) = 1.0;
  lp.b = Eigen::VectorXd::Constant(1, 1.5);
  lp.c = Eigen::Vector2d(3.0, 2.0);
  const LpSolution s = solve_bounded_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 4.0, 1e-12);
  EXPECT_NEAR(s.x[0], 1.0, 1e-12);
  EXPECT_NEAR(s.x[1], 0.5, 1e-12);
  EXPECT_GE(s.dual_bound, s.objective - 1e-9);
}

TEST(Simplex, DualBoundValidOnEarlyStop) {
  std::mt19937_64 rng(8);
  const Network net = build_line(31, UniformCapacity{4});
  const Instance inst = gen_line_stochastic(net, 120, 1, 10, 6.0, 1.0, rng());
  const PackingProblem p = make_packing_problem(net, inst);
  BoundedLp lp{p.load, p.capacities, p.values};
  const LpSolution full = solve_bounded_lp(lp);
  ASSERT_EQ(full.status, LpStatus::Optimal);
  EXPECT_NEAR(full.dual_bound, full.objective, 1e-6 * std::max(1.0, full.objective));
  SimplexOptions opts;
  opts.max_iterations = 5;
  const LpSolution early = solve_bounded_lp(lp, opts);
  EXPECT_EQ(early.status, LpStatus::IterationLimit);
  EXPECT_GE(early.dual_bound, full.objective - 1e-9);
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Many identical columns on identical rows force ties and degenerate pivots.
  BoundedLp lp;
  const int rows = 6, cols = 30;
  lp.A.resize(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      if ((i + j) % 3 != 0) lp.A.insert(i, j) = 1.0;
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.b[0] = 2.0;
  lp.c = Eigen::VectorXd::Ones(cols);
  const LpSolution s = solve_bounded_lp(lp);
  EXPECT_EQ(s.status, LpStatus::Optimal);
  EXPECT_GE(s.dual_bound, s.objective - 1e-9);
  const Eigen::VectorXd lhs = lp.A * s.x;
  for (int i = 0; i < rows; ++i) EXPECT_LE(lhs[i], lp.b[i] + 1e-9);
}

TEST(OptCostWorst, ClosedForm) {
  EXPECT_EQ(opt_cost_worst(1.0, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(opt_cost_worst(4.0, 0.0, 1.0), 1.0);
  EXPECT_NEAR(opt_cost_worst(6.0, 0.0, 40.0), 210.0161, 1e-3);
  EXPECT_EQ(opt_cost_worst(0.5, 0.0, 1.0), 0.0);
  // Grid-search sup of y rho - f(rho)
  double sup = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    const double rho = k * 1e-6;
    sup = std::max(sup, 240.0 * rho - mm1::cost(rho));
  }
  EXPECT_NEAR(sup, opt_cost_worst(6.0, 0.0, 40.0), 1e-6);
}
