#include "pathprice/arrivals.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "pathprice/cost_model.hpp"

namespace pathprice {

namespace {

constexpr double kRelTol = 1e-9;

struct PatternName {
  Pattern pattern;
  const char* name;
};
constexpr PatternName kPatternNames[] = {
    {Pattern::LineStochastic, "line_stochastic"}, {Pattern::TreeSR, "tree_sr"},
    {Pattern::TreeEL, "tree_el"},                 {Pattern::LineHard, "line_hard"},
    {Pattern::TreeHard, "tree_hard"},             {Pattern::CostWorst, "cost_worst"},
};

void check_common(int m, int M, double p_bar, double rate) {
  if (m < 1 || M < m) throw ValidationError("path-length bounds need 1 <= m <= M");
  if (!(p_bar >= 1.0) || !std::isfinite(p_bar)) throw ValidationError("p_bar must be >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw ValidationError("rate must be positive");
}

InstanceParams make_params(int m, int M, double p_bar, double rate, std::uint64_t seed, Pattern p) {
  InstanceParams params;
  params.min_length = m;
  params.max_length = M;
  params.p_bar = p_bar;
  params.eps_max = rate;
  params.seed = seed;
  params.pattern = p;
  return params;
}

Request make_request(const Network& net, int id, NodeId s, NodeId t, double density, double rate) {
  Request r;
  r.id = id;
  r.source = s;
  r.dest = t;
  r.rate = rate;
  r.path = path_between(net, s, t);
  r.value = density * r.path.length() * rate;
  return r;
}

// Densities 1, 1 + (p-1)/K, ..., strictly below p_bar when p_bar > 1.
double sweep_density(double p_bar, int k, int steps) {
  return 1.0 + (p_bar - 1.0) * static_cast<double>(k) / static_cast<double>(steps);
}

}  // namespace

std::string to_string(Pattern p) {
  for (const auto& pn : kPatternNames)
    if (pn.pattern == p) return pn.name;
  return "unknown";
}

Pattern pattern_from_string(const std::string& name) {
  for (const auto& pn : kPatternNames)
    if (name == pn.name) return pn.pattern;
  throw ValidationError("unknown arrival pattern '" + name + "'");
}

double Instance::max_rate() const {
  double r = 0.0;
  for (const auto& q : requests) r = std::max(r, q.rate);
  return r;
}

Instance gen_line_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                             double rate, std::uint64_t seed) {
  if (!net.is_line()) throw ValidationError("line generator needs a line network");
  check_common(m, M, p_bar, rate);
  if (M > net.edge_count()) throw ValidationError("M exceeds the line length");
  if (n_requests < 0) throw ValidationError("request count must be >= 0");

  Instance inst;
  inst.params = make_params(m, M, p_bar, rate, seed, Pattern::LineStochastic);
  inst.requests.reserve(static_cast<std::size_t>(n_requests));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length_dist(m, M);
  std::uniform_real_distribution<double> density_dist(1.0, p_bar);
  for (int i = 0; i < n_requests; ++i) {
    const int len = length_dist(rng);
    std::uniform_int_distribution<NodeId> start_dist(0, net.node_count() - 1 - len);
    const NodeId s = start_dist(rng);
    const double density = density_dist(rng);
    inst.requests.push_back(make_request(net, i, s, s + len, density, rate));
  }
  return inst;
}

Instance gen_tree_sr_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                                double rate, std::uint64_t seed) {
  check_common(m, M, p_bar, rate);
  if (M > net.tree().depth) throw ValidationError("M exceeds the tree depth");
  if (n_requests < 0) throw ValidationError("request count must be >= 0");

  Instance inst;
  inst.params = make_params(m, M, p_bar, rate, seed, Pattern::TreeSR);
  inst.requests.reserve(static_cast<std::size_t>(n_requests));
  const int b = net.tree().branching;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length_dist(m, M);
  std::uniform_int_distribution<int> child_dist(1, b);
  std::uniform_real_distribution<double> density_dist(1.0, p_bar);
  for (int i = 0; i < n_requests; ++i) {
    const int len = length_dist(rng);
    NodeId v = 0;
    for (int step = 0; step < len; ++step) v = b * v + child_dist(rng);
    const double density = density_dist(rng);
    inst.requests.push_back(make_request(net, i, 0, v, density, rate));
  }
  return inst;
}

Instance gen_tree_el_stochastic(const Network& net, int n_requests, int m, int M, double p_bar,
                                double rate, std::uint64_t seed) {
  check_common(m, M, p_bar, rate);
  const int depth = net.tree().depth;
  if (M > depth) throw ValidationError("M exceeds the tree depth");
  if (n_requests < 0) throw ValidationError("request count must be >= 0");

  Instance inst;
  inst.params = make_params(m, M, p_bar, rate, seed, Pattern::TreeEL);
  inst.requests.reserve(static_cast<std::size_t>(n_requests));
  const std::vector<NodeId> leaves = net.nodes_at_depth(depth);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length_dist(m, M);
  std::uniform_int_distribution<std::size_t> leaf_dist(0, leaves.size() - 1);
  std::uniform_real_distribution<double> density_dist(1.0, p_bar);
  for (int i = 0; i < n_requests; ++i) {
    const int len = length_dist(rng);
    const NodeId leaf = leaves[leaf_dist(rng)];
    NodeId s = leaf;
    for (int step = 0; step < len; ++step) s = net.parent(s);
    const double density = density_dist(rng);
    inst.requests.push_back(make_request(net, i, s, leaf, density, rate));
  }
  return inst;
}

Instance gen_line_hard(const Network& net, int m, int M, double p_bar, double rate,
                       int fill_per_step, const HardInstanceOptions& options) {
  if (!net.is_line()) throw ValidationError("line generator needs a line network");
  check_common(m, M, p_bar, rate);
  if (M > net.edge_count()) throw ValidationError("M exceeds the line length");
  if (fill_per_step < 1) throw ValidationError("fill_per_step must be >= 1");

  const double bottleneck = net.capacities().head(M).minCoeff();
  const int steps = options.density_steps > 0
                        ? options.density_steps
                        : std::max(1, static_cast<int>(std::ceil(bottleneck / (fill_per_step * rate) - 1e-9)));
  const int phase2 = options.phase2_count > 0
                         ? options.phase2_count
                         : std::max(1, static_cast<int>(std::floor(bottleneck / rate + 1e-9)));

  Instance inst;
  inst.params = make_params(m, M, p_bar, rate, 0, Pattern::LineHard);
  int id = 0;
  for (int len = m; len <= M; ++len)
    for (int k = 0; k < steps; ++k)
      for (int j = 0; j < fill_per_step; ++j)
        inst.requests.push_back(make_request(net, id++, 0, len, sweep_density(p_bar, k, steps), rate));
  for (int j = 0; j < phase2; ++j) inst.requests.push_back(make_request(net, id++, 0, M, p_bar, rate));
  return inst;
}

Instance gen_tree_hard(const Network& net, int m, int M, double p_bar, double rate,
                       int fill_per_step, const HardInstanceOptions& options) {
  check_common(m, M, p_bar, rate);
  const int b = net.tree().branching;
  if (M > net.tree().depth) throw ValidationError("M exceeds the tree depth");
  if (fill_per_step < 1) throw ValidationError("fill_per_step must be >= 1");

  double top_total = 0.0;
  for (NodeId v : net.nodes_at_depth(1)) top_total += net.edge(v - 1).capacity;
  const int steps = options.density_steps > 0
                        ? options.density_steps
                        : std::max(1, static_cast<int>(std::ceil(top_total / (fill_per_step * rate) - 1e-9)));

  const std::vector<NodeId> targets = net.nodes_at_depth(M);
  int phase2 = options.phase2_count;
  if (phase2 <= 0) {
    // Number per depth-M node that fits from empty: a level-i edge is shared
    // by b^(M-i) of them.
    double fit = std::numeric_limits<double>::infinity();
    const Path probe = path_between(net, 0, targets.front());
    for (EdgeId e : probe.edge_ids) {
      const int level = net.edge_level(e);
      fit = std::min(fit, net.edge(e).capacity / (std::pow(static_cast<double>(b), M - level) * rate));
    }
    phase2 = std::max(1, static_cast<int>(std::floor(fit + 1e-9)));
  }

  Instance inst;
  inst.params = make_params(m, M, p_bar, rate, 0, Pattern::TreeHard);
  int id = 0;
  for (int len = m; len <= M; ++len) {
    const std::vector<NodeId> layer = net.nodes_at_depth(len);
    std::size_t next = 0;
    for (int k = 0; k < steps; ++k) {
      for (int j = 0; j < fill_per_step; ++j) {
        const NodeId t = layer[next];
        next = (next + 1) % layer.size();
        inst.requests.push_back(make_request(net, id++, 0, t, sweep_density(p_bar, k, steps), rate));
      }
    }
  }
  for (int round = 0; round < phase2; ++round)
    for (NodeId t : targets) inst.requests.push_back(make_request(net, id++, 0, t, p_bar, rate));
  return inst;
}

Network cost_worst_network(double capacity) { return build_line(2, UniformCapacity{capacity}); }

Instance gen_cost_worst_instance(double p, double capacity, double eps, int steps) {
  if (!(capacity > 0.0)) throw ValidationError("capacity must be positive");
  if (!(p > 1.0 / capacity)) throw ValidationError("p must exceed 1/capacity");
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (steps < 2) throw ValidationError("need at least 2 density grid points");

  const Network net = cost_worst_network(capacity);
  Instance inst;
  inst.params = make_params(1, 1, p, eps, 0, Pattern::CostWorst);
  inst.params.eps_max = eps;

  int id = 0;
  auto emit_group = [&](double density, double demand) {
    if (!(demand > 0.0)) return;
    const auto count = static_cast<int>(std::ceil(demand / eps - 1e-12));
    const double rate = demand / count;
    for (int j = 0; j < count; ++j) {
      Request r;
      r.id = id++;
      r.source = 0;
      r.dest = 1;
      r.rate = rate;
      r.path = Path{{0}};
      r.value = density * rate;
      inst.requests.push_back(std::move(r));
    }
  };

  const double lo = 1.0 / capacity;
  double cumulative = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double nu = lo + (p - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    const double target = capacity * mm1::conjugate_derivative(nu * capacity);
    emit_group(nu, target - cumulative);
    cumulative = std::max(cumulative, target);
  }
  const double last = p - eps;
  emit_group(last, capacity * mm1::conjugate_derivative(last * capacity));
  return inst;
}

std::vector<Violation> validate_instance(const Instance& inst, const Network& net) {
  std::vector<Violation> out;
  const InstanceParams& prm = inst.params;
  if (prm.min_length < 1 || prm.max_length < prm.min_length)
    out.push_back({-1, Assumption::PathLength, "m <= M violated"});
  const double density_floor =
      prm.pattern == Pattern::CostWorst ? 1.0 / net.max_capacity() : 1.0;

  for (const Request& r : inst.requests) {
    const bool endpoints_ok = r.source >= 0 && r.source < net.node_count() && r.dest >= 0 &&
                              r.dest < net.node_count();
    bool path_ok = endpoints_ok && is_contiguous(net, r.path) &&
                   net.edge(r.path.edge_ids.front()).tail == r.source &&
                   net.edge(r.path.edge_ids.back()).head == r.dest;
    if (!path_ok) {
      out.push_back({r.id, Assumption::PathValidity, "path does not join source to destination"});
    }
    if (!(r.rate > 0.0) || r.rate > prm.eps_max * (1.0 + kRelTol))
      out.push_back({r.id, Assumption::SmallRequest, "rate outside (0, eps]"});
    const int len = r.path.length();
    if (len < prm.min_length || len > prm.max_length)
      out.push_back({r.id, Assumption::PathLength, "path length outside [m, M]"});
    if (len > 0 && r.rate > 0.0) {
      const double d = r.value_density();
      if (!(d >= density_floor * (1.0 - kRelTol)) || !(d <= prm.p_bar * (1.0 + kRelTol)))
        out.push_back({r.id, Assumption::ValueDensity, "value density outside [1, p_bar]"});
    }
  }
  return out;
}

void write_instance(std::ostream& out, const Instance& inst, const Network& net) {
  nlohmann::json header;
  header["format"] = "pathprice-instance";
  header["version"] = 1;
  header["params"] = {{"m", inst.params.min_length},   {"M", inst.params.max_length},
                      {"p_bar", inst.params.p_bar},    {"eps_max", inst.params.eps_max},
                      {"seed", inst.params.seed},      {"pattern", to_string(inst.params.pattern)},
                      {"requests", inst.requests.size()}};
  header["network"] = to_json(net);
  out << header.dump() << '\n';
  for (const Request& r : inst.requests) {
    nlohmann::json row = {{"id", r.id},         {"value", r.value}, {"rate", r.rate},
                          {"source", r.source}, {"dest", r.dest},   {"path", r.path.edge_ids}};
    out << row.dump() << '\n';
  }
}

std::string serialize_instance(const Instance& inst, const Network& net) {
  std::ostringstream os;
  write_instance(os, inst, net);
  return os.str();
}

LoadedInstance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty instance file");
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "pathprice-instance")
      throw ValidationError("not a pathprice instance file");
    Network net = network_from_json(header.at("network"));
    Instance inst;
    const auto& p = header.at("params");
    inst.params.min_length = p.at("m").get<int>();
    inst.params.max_length = p.at("M").get<int>();
    inst.params.p_bar = p.at("p_bar").get<double>();
    inst.params.eps_max = p.at("eps_max").get<double>();
    inst.params.seed = p.at("seed").get<std::uint64_t>();
    inst.params.pattern = pattern_from_string(p.at("pattern").get<std::string>());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto row = nlohmann::json::parse(line);
      Request r;
      r.id = row.at("id").get<int>();
      r.value = row.at("value").get<double>();
      r.rate = row.at("rate").get<double>();
      r.source = row.at("source").get<NodeId>();
      r.dest = row.at("dest").get<NodeId>();
      r.path.edge_ids = row.at("path").get<std::vector<EdgeId>>();
      inst.requests.push_back(std::move(r));
    }
    return {std::move(inst), std::move(net)};
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed instance file: ") + ex.what());
  }
}

}  // namespace pathprice
