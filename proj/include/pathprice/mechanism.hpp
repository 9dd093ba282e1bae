#ifndef PATHPRICE_MECHANISM_HPP
#define PATHPRICE_MECHANISM_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "pathprice/arrivals.hpp"
#include "pathprice/cost_model.hpp"
#include "pathprice/topology.hpp"

namespace pathprice {

/// phi(omega) = exp(gamma * omega / C) - 1
struct ExponentialPricing {
  double gamma = 1.0;
};

/// Monotone utilization -> price map on [0, max_utilization], linearly
/// interpolated between grid points.
class PriceTable {
 public:
  PriceTable() = default;
  PriceTable(std::vector<double> utilization, std::vector<double> price);

  double operator()(double rho) const;
  double max_utilization() const { return rho_.empty() ? 0.0 : rho_.back(); }
  const std::vector<double>& utilization() const { return rho_; }
  const std::vector<double>& price() const { return price_; }
  bool empty() const { return rho_.empty(); }

 private:
  std::vector<double> rho_;
  std::vector<double> price_;
};

/// One table per edge, or a single table shared by every edge.
struct TabulatedPricing {
  std::vector<PriceTable> tables;
  double gamma = 0.0;  // the aggressiveness the tables were solved for

  const PriceTable& table_for(EdgeId e) const;
};

using PricingRule = std::variant<ExponentialPricing, TabulatedPricing>;

double edge_price(const PricingRule& pricing, EdgeId e, double omega, double capacity);

struct AcceptedEntry {
  int request_id = 0;
  Path path;
  double posted_price = 0.0;
};

struct MechanismState {
  Eigen::VectorXd utilization;  // omega_e
  Eigen::VectorXd price;        // lambda_e
  std::vector<AcceptedEntry> accepted;
  int step = 0;

  static MechanismState fresh(const Network& net, const PricingRule& pricing);
};

enum class Outcome { AcceptedFull, RejectedPrice, RejectedCapacity };
std::string to_string(Outcome o);

struct Decision {
  int request_id = 0;
  Outcome outcome = Outcome::RejectedPrice;
  Path path;
  double posted_price = 0.0;  // r_i * lambda^{(i-1)}(P_i)
  double value = 0.0;
  double rate = 0.0;
};

struct MechanismOptions {
  /// Capacity check passes when omega + r <= C (1 + slack).
  double capacity_slack = 1e-9;
  /// Called after every processed request with the updated state.
  std::function<void(const Decision&, const MechanismState&)> observer;
};

struct AssumptionChecks {
  bool eps_le_cmin_over_gamma = false;
};

struct RunReport {
  double alg_welfare = 0.0;
  double accepted_value = 0.0;
  int accepted_count = 0;
  std::vector<Decision> decisions;
  Eigen::VectorXd final_utilization;
  Eigen::VectorXd final_price;
  double cost_total = 0.0;
  AssumptionChecks assumptions_held;
  double capacity_slack = 0.0;
};

/// rate * sum of current edge prices along the path.
double path_price(const MechanismState& state, const Path& path, double rate);

/// Cheapest candidate; ties go to the lexicographically smallest edge list.
const Path& choose_path(const MechanismState& state, const std::vector<Path>& candidates, double rate);

/// One step of the posted-price mechanism. Rejections leave the state
/// untouched (apart from the step counter).
Decision process_request(const Network& net, MechanismState& state, const Request& request,
                         const PricingRule& pricing, const MechanismOptions& options = {});
Decision process_request(const Network& net, MechanismState& state, const Request& request,
                         const std::vector<Path>& candidates, const PricingRule& pricing,
                         const MechanismOptions& options = {});

RunReport run(const Network& net, const Instance& inst, const PricingRule& pricing,
              const MechanismOptions& options = {});

/// Cost-aware variant: acceptance is also refused when it would push an edge
/// past the table domain, and welfare is charged sum_e f(rho_e).
RunReport run_with_cost(const Network& net, const Instance& inst, const TabulatedPricing& pricing,
                        const mm1::CostModel& cost = {}, const MechanismOptions& options = {});

struct Lemma3Result {
  double bound = 0.0;
  bool holds = true;
};

/// bound = sum_e C_e lambda_e / (2 gamma (e - 1)) from the final prices.
Lemma3Result lemma3_lower_bound(const RunReport& report, const Network& net, double gamma);

/// Rebuilds the utilization trajectory from the decision log alone and
/// re-derives every outcome and the welfare total. Returns a description of
/// each disagreement (empty when the log is consistent).
std::vector<std::string> audit_decisions(const Network& net, const Instance& inst,
                                         const PricingRule& pricing, const RunReport& report);

/// One row per request: id, outcome, price, path length, value.
void write_decisions_csv(std::ostream& out, const RunReport& report);
/// One row per edge: edge, capacity, utilization, price.
void write_final_state_csv(std::ostream& out, const RunReport& report, const Network& net);

}  // namespace pathprice

#endif  // PATHPRICE_MECHANISM_HPP
