#ifndef PATHPRICE_ARRIVALS_HPP
#define PATHPRICE_ARRIVALS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathprice/topology.hpp"

namespace pathprice {

enum class Pattern { LineStochastic, TreeSR, TreeEL, LineHard, TreeHard, CostWorst };

std::string to_string(Pattern p);
Pattern pattern_from_string(const std::string& name);

struct Request {
  int id = 0;
  double value = 0.0;
  double rate = 0.0;
  NodeId source = 0;
  NodeId dest = 0;
  Path path;

  /// v / (|P| r)
  double value_density() const { return value / (static_cast<double>(path.length()) * rate); }
};

struct InstanceParams {
  int min_length = 1;  // m
  int max_length = 1;  // M
  double p_bar = 1.0;
  double eps_max = 1.0;
  std::uint64_t seed = 0;
  Pattern pattern = Pattern::LineStochastic;
};

struct Instance {
  std::vector<Request> requests;
  InstanceParams params;

  double max_rate() const;
};

/// Knobs for the deterministic hard-instance generators. Zero means "derive
/// the default": enough density steps for one length sweep to saturate the
/// bottleneck, and enough phase-2 requests to fill it from empty.
struct HardInstanceOptions {
  int density_steps = 0;
  int phase2_count = 0;
};

Instance gen_line_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                             double rate, std::uint64_t seed);
Instance gen_tree_sr_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                                double rate, std::uint64_t seed);
Instance gen_tree_el_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                                double rate, std::uint64_t seed);

/// Phase 1 sweeps lengths m..M (ascending) and, per length, densities from 1
/// upward; every request starts at node 0 so the whole phase funnels through
/// edge 0. Phase 2 sends length-M requests at density p_bar.
Instance gen_line_hard(const Network& net, int m, int M, double p_bar, double rate,
                       int fill_per_step, const HardInstanceOptions& options = {});

/// Tree analogue: phase 1 sends root-anchored requests of each length m..M,
/// spread round-robin over the nodes at that depth; phase 2 sends length-M,
/// density-p_bar requests to every depth-M node.
Instance gen_tree_hard(const Network& net, int m, int M, double p_bar, double rate,
                       int fill_per_step, const HardInstanceOptions& options = {});

/// Discretized worst-case family I_p for the cost-aware case on a single
/// edge of capacity C. Densities ascend over `steps` grid points from 1/C to
/// p; cumulative demand at grid point nu is C f*'(nu C). A final group at
/// density p - eps carries C f*'((p - eps) C). Each request has rate <= eps.
Instance gen_cost_worst_instance(double p, double capacity, double eps, int steps);

/// Single-edge line used by gen_cost_worst_instance.
Network cost_worst_network(double capacity);

enum class Assumption { SmallRequest = 1, PathLength = 2, ValueDensity = 3, PathValidity = 4 };

struct Violation {
  int request_id = -1;  // -1 for instance-level problems
  Assumption assumption = Assumption::PathValidity;
  std::string detail;
};

std::vector<Violation> validate_instance(const Instance& inst, const Network& net);

/// Line-oriented JSON: a header record (params + network) followed by one
/// request per line.
void write_instance(std::ostream& out, const Instance& inst, const Network& net);
std::string serialize_instance(const Instance& inst, const Network& net);

struct LoadedInstance {
  Instance instance;
  Network network;
};
LoadedInstance read_instance(std::istream& in);

}  // namespace pathprice

#endif  // PATHPRICE_ARRIVALS_HPP
