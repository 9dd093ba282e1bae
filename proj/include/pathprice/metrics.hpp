#ifndef PATHPRICE_METRICS_HPP
#define PATHPRICE_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pathprice/mechanism.hpp"
#include "pathprice/offline.hpp"
#include "pathprice/topology.hpp"

namespace pathprice {

/// OPT / ALG with 0/0 = 1 and x/0 = +inf. Throws InvariantError for negative
/// welfare in a run without congestion cost.
double empirical_ratio(const RunReport& run, const OptResult& opt);
double empirical_ratio(double alg_welfare, double opt_value, bool has_cost = false);

struct UtilStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Reduces omega_e / C_e over every edge.
UtilStats utilization_stats(const Eigen::VectorXd& utilization, const Network& net);
/// Same reducer applied to the load of an offline selection.
UtilStats utilization_stats(const PackingProblem& problem, const std::vector<int>& selection, const Network& net);

struct ExperimentPoint {
  std::string experiment;
  std::string topology;  // "line" or "tree"
  std::string pattern;
  double gamma = 0.0;
  int m = 1;
  int M = 1;
  double p_bar = 1.0;
  std::uint64_t seed = 0;
  int n_requests = 0;
  int accepted = 0;
  double acceptance_rate = 0.0;
  double alg_welfare = 0.0;
  double opt_value = 0.0;
  bool opt_exact = true;
  double opt_gap = 0.0;
  double ratio = 1.0;
  UtilStats alg_util;
  UtilStats opt_util;
  bool eps_ok = false;       // max r <= C_min / gamma
  bool lemma3_holds = true;  // only meaningful when eps_ok
  double bound = 0.0;        // theoretical reference curve at these parameters (0 if none)
};

/// Column order of the per-point results CSV.
const std::vector<std::string>& point_columns();
void write_points_csv(std::ostream& out, const std::vector<ExperimentPoint>& points, bool header = true);
/// Parses a results CSV (lines starting with '#' are skipped). Throws
/// ValidationError naming the offending line/column.
std::vector<ExperimentPoint> read_points_csv(std::istream& in);

struct Moments {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for one point
};

struct AggregateRow {
  std::map<std::string, std::string> key;
  int count = 0;
  int infinite_ratios = 0;
  int inexact_opt = 0;
  Moments ratio;  // over finite ratios only
  Moments acceptance;
  Moments alg_util_min, alg_util_mean, alg_util_max;
  Moments opt_util_min, opt_util_mean, opt_util_max;
};

/// Valid group keys: experiment, topology, pattern, gamma, m, M, p_bar.
/// Output rows are sorted by key; per-group sums run in (seed, fields) order
/// so the result does not depend on input order.
std::vector<AggregateRow> aggregate(const std::vector<ExperimentPoint>& points,
                                    const std::vector<std::string>& group_keys);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const std::vector<std::string>& group_keys);

/// Shortest round-trip text for a double ("inf" / "-inf" / "nan" for non-finite).
std::string format_double(double x);

}  // namespace pathprice

#endif  // PATHPRICE_METRICS_HPP
