#ifndef PATHPRICE_HARNESS_HPP
#define PATHPRICE_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathprice/arrivals.hpp"
#include "pathprice/cost.hpp"
#include "pathprice/metrics.hpp"
#include "pathprice/topology.hpp"

namespace pathprice {

struct TopologySpec {
  std::string kind = "line";  // line | tree
  int nodes = 101;            // line only
  int depth = 8;              // tree only
  int branching = 2;          // tree only
  std::string profile = "uniform";  // uniform | expdecay (tree)
  double capacity = 100.0;          // C, or the top-level capacity for expdecay
};

Network build_network(const TopologySpec& t);

enum class SweepVar { M, m, MOverm, PBar };
std::string to_string(SweepVar v);
SweepVar sweep_var_from_string(const std::string& s);

/// One swept axis. The non-swept length stays at fixed_m / fixed_M; for
/// MOverm, M = fixed_m * value.
struct SweepSpec {
  SweepVar var = SweepVar::M;
  std::vector<double> values;
  int fixed_m = 1;
  int fixed_M = 1;
};

/// A gamma value, or the order-optimal choice for each cell's (M, m, p_bar).
struct GammaChoice {
  bool order_optimal = false;
  double value = 0.0;

  double resolve(int M, int m, double p_bar) const;
  std::string label() const;
};

struct ExperimentSpec {
  std::string id;
  std::string figure;
  std::string description;
  TopologySpec topology;
  Pattern pattern = Pattern::LineStochastic;
  int n_requests = 300;
  double p_bar = 6.0;
  double rate = 1.0;
  std::vector<SweepSpec> sweeps;
  std::vector<GammaChoice> gammas;
  int seed_count = 20;
  std::uint64_t seed_base = 1;
  double opt_time_limit = 30.0;  // seconds per branch-and-bound solve
  int exact_cap = 0;             // exhaustive search when a problem has <= this many requests
  int fill_per_step = 1;         // hard instances
  // Cost sweep (pattern CostWorst).
  double cost_tol = 1e-3;
  int cost_steps = 200;
  double cost_eps_factor = 1e-3;  // eps = capacity * factor
  std::string output;             // results CSV path; empty keeps results in memory
};

/// Built-in experiments E2..E8, one per plot family.
std::vector<ExperimentSpec> catalog();
/// Throws ValidationError for an unknown id.
ExperimentSpec catalog_spec(const std::string& id);

/// Throws ValidationError for empty grids, bad lengths or unknown keys.
void validate_spec(const ExperimentSpec& spec);

/// Overlays the fields present in `doc` onto `spec` (document over catalog).
void apply_document(ExperimentSpec& spec, const nlohmann::json& doc);
/// Loads a JSON spec document: starts from the catalog entry named by its
/// "id" (if any) and overlays the document.
ExperimentSpec load_spec(std::istream& in);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

struct CostPoint {
  double capacity = 0.0;
  double p_bar = 0.0;
  MinGammaResult min_gamma;
  double worst_opt = 0.0;
  double worst_alg = 0.0;
  double worst_ratio = 0.0;
  int worst_requests = 0;
};

/// Smallest feasible gamma at (capacity, p_bar), then the exported pricing
/// table run on the discretized worst instance.
CostPoint evaluate_cost_point(double capacity, double p_bar, double tol, int steps, double eps_factor);
void write_cost_csv(std::ostream& out, const std::vector<CostPoint>& points);

struct CellFailure {
  std::string cell;
  std::string message;
};

struct ExperimentResult {
  std::vector<ExperimentPoint> points;
  std::vector<CostPoint> cost_points;
  std::vector<CellFailure> failures;
  std::vector<std::string> log;  // one line per cell, including wall time
};

/// Worker count from PATHPRICE_WORKERS (default: hardware concurrency).
int worker_count();

/// Runs every sweep value x seed cell on a bounded worker pool; rows are
/// ordered by cell key, not completion order.
ExperimentResult execute(const ExperimentSpec& spec, int workers = 0);

/// execute() plus persistence: spec.output (results CSV, a leading '#'
/// timestamp line), <stem>_aggregate.csv and <stem>.log.
ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 0);

}  // namespace pathprice

#endif  // PATHPRICE_HARNESS_HPP
