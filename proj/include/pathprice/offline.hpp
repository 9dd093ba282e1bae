#ifndef PATHPRICE_OFFLINE_HPP
#define PATHPRICE_OFFLINE_HPP

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pathprice/arrivals.hpp"
#include "pathprice/topology.hpp"

namespace pathprice {

/// max sum v_i x_i  s.t.  sum_{i : e in P_i} r_i x_i <= C_e,  x binary.
/// Column i of `load` holds r_i on the edges of request i's path.
struct PackingProblem {
  std::vector<int> request_ids;  // ascending arrival order
  Eigen::VectorXd values;
  Eigen::VectorXd rates;
  Eigen::VectorXd capacities;
  Eigen::SparseMatrix<double> load;  // edges x requests

  int size() const { return static_cast<int>(request_ids.size()); }
  int edge_count() const { return static_cast<int>(capacities.size()); }
};

/// Requests whose path is not a valid contiguous path of `net` are dropped.
PackingProblem make_packing_problem(const Network& net, const Instance& inst);

struct OptResult {
  double value = 0.0;
  std::vector<int> selection;  // request ids, ascending
  bool exact = true;
  double bound_gap = 0.0;
  int nodes = 0;
  bool lp_fallback = false;  // some LP solve failed and the trivial bound was used
};

/// Relative slack on capacity rows, matching the mechanism's default.
inline constexpr double kPackingSlack = 1e-9;

/// Sum of selected values, added in ascending id order.
double selection_value(const PackingProblem& problem, const std::vector<int>& selection);
/// Per-edge load of a selection.
Eigen::VectorXd selection_load(const PackingProblem& problem, const std::vector<int>& selection);
bool selection_feasible(const PackingProblem& problem, const std::vector<int>& selection);

/// Exhaustive search; at most 22 requests. Ties go to the lexicographically
/// smallest id list.
OptResult opt_bruteforce(const PackingProblem& problem);

/// Depth-first branch-and-bound on the LP relaxation. Branches on the
/// highest-density fractional request. Stops at `time_limit_seconds` and then
/// reports the incumbent with bound_gap = best open bound - incumbent.
OptResult opt_bnb(const PackingProblem& problem, double time_limit_seconds = 60.0);

struct LpBound {
  double value = 0.0;
  bool fallback = false;  // numerical failure; value is sum v_i
  bool integral = false;
  Eigen::VectorXd x;
};

LpBound lp_relaxation(const PackingProblem& problem);
double lp_upper_bound(const PackingProblem& problem);

/// f*((p - eps) C): offline welfare of the cost-case worst instance.
double opt_cost_worst(double p, double eps, double capacity);

}  // namespace pathprice

#endif  // PATHPRICE_OFFLINE_HPP
