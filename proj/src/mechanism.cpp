#include "pathprice/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace pathprice {

namespace {

constexpr double kTableEdgeTol = 1e-9;

bool fits(const Network& net, const Eigen::VectorXd& omega, const Path& path, double rate,
          const PricingRule& pricing, double slack) {
  const auto* tab = std::get_if<TabulatedPricing>(&pricing);
  for (EdgeId e : path.edge_ids) {
    const double cap = net.edge(e).capacity;
    const double next = omega[e] + rate;
    if (next > cap * (1.0 + slack)) return false;
    if (tab != nullptr && next / cap > tab->table_for(e).max_utilization() * (1.0 + slack)) return false;
  }
  return true;
}

void require_coherent(const Network& net, const MechanismState& state, const PricingRule& pricing,
                      const std::vector<Path>& candidates) {
  for (const Path& p : candidates) {
    for (EdgeId e : p.edge_ids) {
      if (e < 0 || e >= net.edge_count()) throw InvariantError("path edge out of range");
      const double expect = edge_price(pricing, e, state.utilization[e], net.edge(e).capacity);
      if (state.price[e] != expect)
        throw InvariantError("price of edge " + std::to_string(e) + " is out of sync with its utilization");
    }
  }
}

void require_valid(const Instance& inst, const Network& net) {
  const auto violations = validate_instance(inst, net);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw ValidationError("instance violates assumption " +
                          std::to_string(static_cast<int>(v.assumption)) + " at request " +
                          std::to_string(v.request_id) + ": " + v.detail + " (" +
                          std::to_string(violations.size()) + " violations)");
  }
}

bool eps_predicate(const Network& net, const Instance& inst, double gamma) {
  if (!(gamma > 0.0)) return false;
  return inst.max_rate() <= net.min_capacity() / gamma;
}

RunReport run_impl(const Network& net, const Instance& inst, const PricingRule& pricing,
                   const mm1::CostModel* cost, const MechanismOptions& options) {
  require_valid(inst, net);
  MechanismState state = MechanismState::fresh(net, pricing);
  RunReport report;
  report.capacity_slack = options.capacity_slack;
  report.decisions.reserve(inst.requests.size());
  for (const Request& r : inst.requests) {
    Decision d = process_request(net, state, r, pricing, options);
    if (d.outcome == Outcome::AcceptedFull) {
      report.accepted_value += d.value;
      ++report.accepted_count;
    }
    report.decisions.push_back(std::move(d));
  }
  report.final_utilization = state.utilization;
  report.final_price = state.price;
  if (cost != nullptr) {
    for (EdgeId e = 0; e < net.edge_count(); ++e)
      report.cost_total += cost->f(state.utilization[e] / net.edge(e).capacity);
  }
  report.alg_welfare = report.accepted_value - report.cost_total;
  const double gamma = std::visit([](const auto& p) { return p.gamma; }, pricing);
  report.assumptions_held.eps_le_cmin_over_gamma = eps_predicate(net, inst, gamma);
  return report;
}

}  // namespace

PriceTable::PriceTable(std::vector<double> utilization, std::vector<double> price)
    : rho_(std::move(utilization)), price_(std::move(price)) {
  if (rho_.size() != price_.size() || rho_.size() < 2)
    throw ValidationError("price table needs matching grids with at least two points");
  if (rho_.front() != 0.0) throw ValidationError("price table must start at utilization 0");
  for (std::size_t i = 1; i < rho_.size(); ++i) {
    if (!(rho_[i] > rho_[i - 1])) throw ValidationError("price table utilization grid must ascend");
    if (price_[i] < price_[i - 1]) throw ValidationError("price table must be non-decreasing");
  }
}

double PriceTable::operator()(double rho) const {
  if (rho_.empty()) throw InvariantError("empty price table");
  const double hi = rho_.back();
  if (rho < 0.0 || rho > hi * (1.0 + kTableEdgeTol) + kTableEdgeTol)
    throw InvariantError("utilization outside the price table domain");
  if (rho >= hi) return price_.back();
  const auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
  const auto k = static_cast<std::size_t>(it - rho_.begin());
  const double t = (rho - rho_[k - 1]) / (rho_[k] - rho_[k - 1]);
  return price_[k - 1] + t * (price_[k] - price_[k - 1]);
}

const PriceTable& TabulatedPricing::table_for(EdgeId e) const {
  if (tables.empty()) throw InvariantError("tabulated pricing without tables");
  if (tables.size() == 1) return tables.front();
  return tables.at(static_cast<std::size_t>(e));
}

double edge_price(const PricingRule& pricing, EdgeId e, double omega, double capacity) {
  if (const auto* ex = std::get_if<ExponentialPricing>(&pricing))
    return std::exp(ex->gamma * omega / capacity) - 1.0;
  return std::get<TabulatedPricing>(pricing).table_for(e)(omega / capacity);
}

MechanismState MechanismState::fresh(const Network& net, const PricingRule& pricing) {
  MechanismState s;
  s.utilization = Eigen::VectorXd::Zero(net.edge_count());
  s.price.resize(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) s.price[e] = edge_price(pricing, e, 0.0, net.edge(e).capacity);
  return s;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::AcceptedFull: return "accepted";
    case Outcome::RejectedPrice: return "rejected_price";
    case Outcome::RejectedCapacity: return "rejected_capacity";
  }
  return "unknown";
}

double path_price(const MechanismState& state, const Path& path, double rate) {
  double sum = 0.0;
  for (EdgeId e : path.edge_ids) sum += state.price[e];
  return rate * sum;
}

const Path& choose_path(const MechanismState& state, const std::vector<Path>& candidates, double rate) {
  if (candidates.empty()) throw NoPathError("request has no candidate path");
  const Path* best = &candidates.front();
  double best_price = path_price(state, *best, rate);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double p = path_price(state, candidates[k], rate);
    if (p < best_price || (p == best_price && candidates[k].edge_ids < best->edge_ids)) {
      best = &candidates[k];
      best_price = p;
    }
  }
  return *best;
}

Decision process_request(const Network& net, MechanismState& state, const Request& request,
                         const PricingRule& pricing, const MechanismOptions& options) {
  return process_request(net, state, request, std::vector<Path>{request.path}, pricing, options);
}

Decision process_request(const Network& net, MechanismState& state, const Request& request,
                         const std::vector<Path>& candidates, const PricingRule& pricing,
                         const MechanismOptions& options) {
  require_coherent(net, state, pricing, candidates);
  const Path& path = choose_path(state, candidates, request.rate);

  Decision d;
  d.request_id = request.id;
  d.path = path;
  d.posted_price = path_price(state, path, request.rate);
  d.value = request.value;
  d.rate = request.rate;

  if (!(request.value > d.posted_price)) {
    d.outcome = Outcome::RejectedPrice;
  } else if (!fits(net, state.utilization, path, request.rate, pricing, options.capacity_slack)) {
    d.outcome = Outcome::RejectedCapacity;
  } else {
    d.outcome = Outcome::AcceptedFull;
    for (EdgeId e : path.edge_ids) {
      state.utilization[e] += request.rate;
      state.price[e] = edge_price(pricing, e, state.utilization[e], net.edge(e).capacity);
    }
    state.accepted.push_back({request.id, path, d.posted_price});
  }
  ++state.step;
  if (options.observer) options.observer(d, state);
  return d;
}

RunReport run(const Network& net, const Instance& inst, const PricingRule& pricing,
              const MechanismOptions& options) {
  return run_impl(net, inst, pricing, nullptr, options);
}

RunReport run_with_cost(const Network& net, const Instance& inst, const TabulatedPricing& pricing,
                        const mm1::CostModel& cost, const MechanismOptions& options) {
  return run_impl(net, inst, PricingRule{pricing}, &cost, options);
}

Lemma3Result lemma3_lower_bound(const RunReport& report, const Network& net, double gamma) {
  Lemma3Result out;
  if (report.final_price.size() == 0) return out;
  const double weighted = net.capacities().dot(report.final_price);
  out.bound = weighted / (2.0 * gamma * (std::numbers::e - 1.0));
  out.holds = report.alg_welfare >= out.bound - 1e-9 * std::max(1.0, out.bound);
  return out;
}

std::vector<std::string> audit_decisions(const Network& net, const Instance& inst,
                                         const PricingRule& pricing, const RunReport& report) {
  std::vector<std::string> issues;
  auto note = [&](std::size_t i, const std::string& what) {
    std::ostringstream os;
    os << "decision " << i << ": " << what;
    issues.push_back(os.str());
  };
  if (report.decisions.size() != inst.requests.size()) {
    issues.push_back("decision log length does not match the instance");
    return issues;
  }
  Eigen::VectorXd omega = Eigen::VectorXd::Zero(net.edge_count());
  double accepted_value = 0.0;
  for (std::size_t i = 0; i < report.decisions.size(); ++i) {
    const Decision& d = report.decisions[i];
    const Request& r = inst.requests[i];
    if (d.request_id != r.id) note(i, "request id mismatch");
    double lambda = 0.0;
    for (EdgeId e : d.path.edge_ids) lambda += edge_price(pricing, e, omega[e], net.edge(e).capacity);
    const double price = r.rate * lambda;
    if (std::abs(price - d.posted_price) > 1e-12 * std::max(1.0, std::abs(price)))
      note(i, "posted price does not match the rebuilt state");
    Outcome expect = Outcome::RejectedPrice;
    if (r.value > price)
      expect = fits(net, omega, d.path, r.rate, pricing, report.capacity_slack) ? Outcome::AcceptedFull
                                                                               : Outcome::RejectedCapacity;
    if (expect != d.outcome) note(i, "outcome " + to_string(d.outcome) + " but rule gives " + to_string(expect));
    if (d.outcome == Outcome::AcceptedFull) {
      if (!(d.value > d.posted_price)) note(i, "accepted without value exceeding price");
      for (EdgeId e : d.path.edge_ids) {
        omega[e] += r.rate;
        if (omega[e] > net.edge(e).capacity * (1.0 + report.capacity_slack)) note(i, "capacity exceeded");
      }
      accepted_value += r.value;
    }
  }
  if (report.final_utilization.size() != omega.size() || report.final_utilization != omega)
    issues.push_back("final utilization differs from the replayed log");
  for (EdgeId e = 0; e < net.edge_count() && report.final_price.size() == omega.size(); ++e) {
    if (report.final_price[e] != edge_price(pricing, e, omega[e], net.edge(e).capacity))
      issues.push_back("final price of edge " + std::to_string(e) + " is incoherent");
  }
  if (accepted_value != report.accepted_value) issues.push_back("accepted value does not match the log");
  if (report.alg_welfare != report.accepted_value - report.cost_total)
    issues.push_back("welfare is not accepted value minus cost");
  return issues;
}

void write_decisions_csv(std::ostream& out, const RunReport& report) {
  out << "id,outcome,price,path_length,value\n";
  out.precision(17);
  for (const Decision& d : report.decisions)
    out << d.request_id << ',' << to_string(d.outcome) << ',' << d.posted_price << ','
        << d.path.length() << ',' << d.value << '\n';
}

void write_final_state_csv(std::ostream& out, const RunReport& report, const Network& net) {
  out << "edge,capacity,utilization,price\n";
  out.precision(17);
  for (EdgeId e = 0; e < net.edge_count(); ++e)
    out << e << ',' << net.edge(e).capacity << ',' << report.final_utilization[e] << ','
        << report.final_price[e] << '\n';
}

}  // namespace pathprice
