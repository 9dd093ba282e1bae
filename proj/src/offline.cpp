#include "pathprice/offline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "pathprice/cost_model.hpp"
#include "pathprice/errors.hpp"
#include "pathprice/simplex.hpp"

namespace pathprice {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

constexpr int kBruteForceCap = 22;
constexpr double kIntegralTol = 1e-7;

double row_limit(double capacity) { return capacity * (1.0 + kPackingSlack); }

bool all_values_integral(const PackingProblem& p) {
  for (Eigen::Index i = 0; i < p.values.size(); ++i)
    if (p.values[i] != std::round(p.values[i])) return false;
  return true;
}

std::vector<int> density_order(const PackingProblem& p) {
  std::vector<double> density(static_cast<std::size_t>(p.size()));
  for (int i = 0; i < p.size(); ++i) {
    const double len = static_cast<double>(p.load.col(i).nonZeros());
    density[i] = p.values[i] / (std::max(len, 1.0) * p.rates[i]);
  }
  std::vector<int> order(static_cast<std::size_t>(p.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return density[a] > density[b]; });
  return order;
}

std::vector<int> to_ids(const PackingProblem& p, std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  std::vector<int> ids;
  ids.reserve(indices.size());
  for (int i : indices) ids.push_back(p.request_ids[i]);
  return ids;
}

// LP over the free columns with residual capacities. Only rows whose total
// free demand exceeds the residual can bind; the rest are dropped.
struct SubLp {
  double bound = 0.0;  // upper bound on the free part
  bool fallback = false;
  std::vector<int> free_cols;
  Eigen::VectorXd x;  // aligned with free_cols
};

SubLp solve_sub_lp(const PackingProblem& p, const std::vector<int>& free_cols, const Eigen::VectorXd& residual) {
  SubLp out;
  out.free_cols = free_cols;
  const int E = p.edge_count();
  Eigen::VectorXd demand = Eigen::VectorXd::Zero(E);
  for (int i : free_cols)
    for (SpMat::InnerIterator it(p.load, i); it; ++it) demand[it.row()] += it.value();

  std::vector<int> row_of(static_cast<std::size_t>(E), -1);
  int rows = 0;
  for (int e = 0; e < E; ++e)
    if (demand[e] > residual[e] + 1e-12 * std::max(1.0, p.capacities[e])) row_of[e] = rows++;

  BoundedLp lp;
  const int n = static_cast<int>(free_cols.size());
  lp.c.resize(n);
  lp.b.resize(rows);
  for (int e = 0; e < E; ++e)
    if (row_of[e] >= 0) lp.b[row_of[e]] = std::max(residual[e], 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < n; ++k) {
    const int i = free_cols[k];
    lp.c[k] = p.values[i];
    for (SpMat::InnerIterator it(p.load, i); it; ++it)
      if (row_of[it.row()] >= 0) trip.emplace_back(row_of[it.row()], k, it.value());
  }
  lp.A.resize(rows, n);
  lp.A.setFromTriplets(trip.begin(), trip.end());

  const LpSolution sol = solve_bounded_lp(lp);
  if (sol.status == LpStatus::NumericalFailure || !std::isfinite(sol.dual_bound)) {
    out.fallback = true;
    out.bound = lp.c.cwiseMax(0.0).sum();
    out.x = Eigen::VectorXd::Constant(n, 0.5);
    return out;
  }
  out.bound = sol.dual_bound;
  out.x = sol.x;
  return out;
}

}  // namespace

PackingProblem make_packing_problem(const Network& net, const Instance& inst) {
  PackingProblem p;
  p.capacities = net.capacities();
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> values, rates;
  int col = 0;
  for (const Request& r : inst.requests) {
    if (r.path.length() < 1 || !is_contiguous(net, r.path)) continue;
    p.request_ids.push_back(r.id);
    values.push_back(r.value);
    rates.push_back(r.rate);
    for (EdgeId e : r.path.edge_ids) trip.emplace_back(e, col, r.rate);
    ++col;
  }
  p.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  p.rates = Eigen::Map<Eigen::VectorXd>(rates.data(), static_cast<Eigen::Index>(rates.size()));
  p.load.resize(net.edge_count(), col);
  p.load.setFromTriplets(trip.begin(), trip.end());
  return p;
}

double selection_value(const PackingProblem& problem, const std::vector<int>& selection) {
  std::vector<int> ids = selection;
  std::sort(ids.begin(), ids.end());
  double sum = 0.0;
  for (int id : ids) {
    const auto it = std::lower_bound(problem.request_ids.begin(), problem.request_ids.end(), id);
    if (it == problem.request_ids.end() || *it != id) throw ValidationError("unknown request id in selection");
    sum += problem.values[it - problem.request_ids.begin()];
  }
  return sum;
}

Eigen::VectorXd selection_load(const PackingProblem& problem, const std::vector<int>& selection) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(problem.edge_count());
  for (int id : selection) {
    const auto it = std::lower_bound(problem.request_ids.begin(), problem.request_ids.end(), id);
    if (it == problem.request_ids.end() || *it != id) throw ValidationError("unknown request id in selection");
    const auto col = static_cast<Eigen::Index>(it - problem.request_ids.begin());
    for (SpMat::InnerIterator e(problem.load, col); e; ++e) load[e.row()] += e.value();
  }
  return load;
}

bool selection_feasible(const PackingProblem& problem, const std::vector<int>& selection) {
  const Eigen::VectorXd load = selection_load(problem, selection);
  for (int e = 0; e < problem.edge_count(); ++e)
    if (load[e] > row_limit(problem.capacities[e])) return false;
  return true;
}

OptResult opt_bruteforce(const PackingProblem& problem) {
  const int n = problem.size();
  if (n > kBruteForceCap)
    throw SizeError("exhaustive search is limited to " + std::to_string(kBruteForceCap) + " requests");

  Eigen::VectorXd limit = problem.capacities.unaryExpr([](double c) { return row_limit(c); });
  Eigen::VectorXd load = Eigen::VectorXd::Zero(problem.edge_count());
  std::vector<int> current, best;
  double best_value = 0.0;

  // Include-first DFS in index order, so partial sums accumulate in id order.
  auto dfs = [&](auto&& self, int i, double value) -> void {
    if (i == n) {
      if (value > best_value || (value == best_value && current < best)) {
        best_value = value;
        best = current;
      }
      return;
    }
    bool fits = true;
    for (SpMat::InnerIterator it(problem.load, i); it; ++it)
      if (load[it.row()] + it.value() > limit[it.row()]) fits = false;
    if (fits) {
      for (SpMat::InnerIterator it(problem.load, i); it; ++it) load[it.row()] += it.value();
      current.push_back(i);
      self(self, i + 1, value + problem.values[i]);
      current.pop_back();
      for (SpMat::InnerIterator it(problem.load, i); it; ++it) load[it.row()] -= it.value();
    }
    self(self, i + 1, value);
  };
  dfs(dfs, 0, 0.0);

  OptResult out;
  out.selection = to_ids(problem, best);
  out.value = selection_value(problem, out.selection);
  out.exact = true;
  out.nodes = 1 << n;
  return out;
}

LpBound lp_relaxation(const PackingProblem& problem) {
  std::vector<int> cols(static_cast<std::size_t>(problem.size()));
  std::iota(cols.begin(), cols.end(), 0);
  const Eigen::VectorXd residual = problem.capacities.unaryExpr([](double c) { return row_limit(c); });
  const SubLp sub = solve_sub_lp(problem, cols, residual);
  LpBound out;
  out.value = sub.bound;
  out.fallback = sub.fallback;
  out.x = sub.x;
  out.integral = !sub.fallback;
  for (Eigen::Index i = 0; i < sub.x.size() && out.integral; ++i)
    if (std::min(sub.x[i], 1.0 - sub.x[i]) > kIntegralTol) out.integral = false;
  return out;
}

double lp_upper_bound(const PackingProblem& problem) { return lp_relaxation(problem).value; }

OptResult opt_bnb(const PackingProblem& problem, double time_limit_seconds) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const int n = problem.size();
  const int E = problem.edge_count();
  const bool integral_values = all_values_integral(problem);
  const std::vector<int> order = density_order(problem);
  const Eigen::VectorXd limit = problem.capacities.unaryExpr([](double c) { return row_limit(c); });

  OptResult out;
  out.exact = true;

  // Greedy incumbent in density order.
  std::vector<int> incumbent;
  {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(E);
    for (int i : order) {
      bool fits = true;
      for (SpMat::InnerIterator it(problem.load, i); it; ++it)
        if (load[it.row()] + it.value() > limit[it.row()]) fits = false;
      if (!fits) continue;
      for (SpMat::InnerIterator it(problem.load, i); it; ++it) load[it.row()] += it.value();
      incumbent.push_back(i);
    }
  }
  double best = selection_value(problem, to_ids(problem, incumbent));

  auto improves = [&](double bound) { return bound > best + 1e-9 * std::max(1.0, std::abs(best)); };
  auto offer = [&](const std::vector<int>& sel) {
    const std::vector<int> ids = to_ids(problem, sel);
    if (!selection_feasible(problem, ids)) return;
    const double v = selection_value(problem, ids);
    if (v > best) {
      best = v;
      incumbent = sel;
    }
  };

  struct Node {
    std::vector<signed char> fix;  // -1 free, 0 out, 1 in
    double parent_bound;
  };
  std::vector<Node> stack;
  stack.push_back({std::vector<signed char>(static_cast<std::size_t>(n), -1),
                   std::numeric_limits<double>::infinity()});

  bool timed_out = false;
  double open_bound = -std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (elapsed > time_limit_seconds) {
      timed_out = true;
      for (const Node& nd : stack) open_bound = std::max(open_bound, nd.parent_bound);
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (!improves(node.parent_bound)) continue;
    ++out.nodes;

    Eigen::VectorXd residual = limit;
    double fixed_value = 0.0;
    std::vector<int> chosen;
    for (int i = 0; i < n; ++i) {
      if (node.fix[i] != 1) continue;
      chosen.push_back(i);
      fixed_value += problem.values[i];
      for (SpMat::InnerIterator it(problem.load, i); it; ++it) residual[it.row()] -= it.value();
    }
    std::vector<int> free_cols;
    for (int i : order) {
      if (node.fix[i] != -1) continue;
      bool alone = true;
      for (SpMat::InnerIterator it(problem.load, i); it; ++it)
        if (it.value() > residual[it.row()]) alone = false;
      if (alone) free_cols.push_back(i);
      else node.fix[i] = 0;
    }
    if (free_cols.empty()) {
      offer(chosen);
      continue;
    }

    const SubLp sub = solve_sub_lp(problem, free_cols, residual);
    if (sub.fallback) out.lp_fallback = true;
    double bound = fixed_value + sub.bound;
    if (integral_values) bound = std::floor(bound + 1e-6);
    bound = std::min(bound, node.parent_bound);
    if (!improves(bound)) continue;

    int branch = -1;
    std::vector<int> rounded = chosen;
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      const double x = sub.x[static_cast<Eigen::Index>(k)];
      if (std::min(x, 1.0 - x) > kIntegralTol) {
        if (branch < 0) branch = free_cols[k];  // free_cols is in density order
      } else if (x > 0.5) {
        rounded.push_back(free_cols[k]);
      }
    }
    if (branch < 0) {
      // Integral relaxation: this subtree is solved unless round-off made the
      // rounded point infeasible, in which case keep branching.
      offer(rounded);
      if (selection_feasible(problem, to_ids(problem, rounded))) continue;
      branch = free_cols.front();
    }
    Node off = node;
    off.fix[branch] = 0;
    off.parent_bound = bound;
    node.fix[branch] = 1;
    node.parent_bound = bound;
    stack.push_back(std::move(off));
    stack.push_back(std::move(node));
  }

  out.selection = to_ids(problem, incumbent);
  out.value = selection_value(problem, out.selection);
  if (timed_out) {
    out.exact = false;
    out.bound_gap = std::max(0.0, open_bound - out.value);
  }
  return out;
}

double opt_cost_worst(double p, double eps, double capacity) {
  return mm1::conjugate((p - eps) * capacity);
}

}  // namespace pathprice
