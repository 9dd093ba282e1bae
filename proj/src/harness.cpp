#include "pathprice/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pathprice/errors.hpp"
#include "pathprice/mechanism.hpp"
#include "pathprice/offline.hpp"
#include "pathprice/theory.hpp"

namespace pathprice {

namespace {

using nlohmann::json;

std::vector<double> range(double lo, double hi, double step = 1.0) {
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

GammaChoice g(double v) { return {false, v}; }
GammaChoice g_opt() { return {true, 0.0}; }

// (m, M) of a sweep point.
std::pair<int, int> lengths_at(const SweepSpec& s, double value) {
  const int v = static_cast<int>(std::lround(value));
  switch (s.var) {
    case SweepVar::M: return {s.fixed_m, v};
    case SweepVar::m: return {v, s.fixed_M};
    case SweepVar::MOverm: return {s.fixed_m, s.fixed_m * v};
    case SweepVar::PBar: return {s.fixed_m, s.fixed_M};
  }
  return {s.fixed_m, s.fixed_M};
}

double reference_bound(const Network& net, Pattern pattern, double gamma, int M, int m, double p_bar) {
  if (!(gamma > 0.0) || m < 1 || M < m) return 0.0;
  switch (pattern) {
    case Pattern::LineStochastic:
    case Pattern::LineHard: {
      const double beta = capacity_ratio_beta(net);
      return beta == 1.0 ? cr_line_uniform(gamma, M, m, p_bar) : cr_line_hetero(gamma, M, m, p_bar, beta);
    }
    case Pattern::TreeSR:
    case Pattern::TreeHard: {
      const auto prof = std::holds_alternative<ExpDecayCapacity>(net.profile()) ? TreeProfile::ExpDecay
                                                                               : TreeProfile::Uniform;
      return cr_tree_sr(gamma, M, m, p_bar, prof);
    }
    case Pattern::TreeEL: {
      const auto prof = std::holds_alternative<ExpDecayCapacity>(net.profile()) ? TreeProfile::ExpDecay
                                                                               : TreeProfile::Uniform;
      return cr_tree_el(gamma, M, m, p_bar, prof);
    }
    case Pattern::CostWorst: return 0.0;
  }
  return 0.0;
}

Instance generate(const ExperimentSpec& spec, const Network& net, int m, int M, std::uint64_t seed) {
  switch (spec.pattern) {
    case Pattern::LineStochastic: return gen_line_stochastic(net, spec.n_requests, m, M, spec.p_bar, spec.rate, seed);
    case Pattern::TreeSR: return gen_tree_sr_stochastic(net, spec.n_requests, m, M, spec.p_bar, spec.rate, seed);
    case Pattern::TreeEL: return gen_tree_el_stochastic(net, spec.n_requests, m, M, spec.p_bar, spec.rate, seed);
    case Pattern::LineHard: return gen_line_hard(net, m, M, spec.p_bar, spec.rate, spec.fill_per_step);
    case Pattern::TreeHard: return gen_tree_hard(net, m, M, spec.p_bar, spec.rate, spec.fill_per_step);
    case Pattern::CostWorst: break;
  }
  throw ValidationError("pattern has no packing experiment");
}

struct Cell {
  std::size_t sweep = 0;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string key;
};

struct CellOutput {
  std::vector<ExperimentPoint> points;
  std::optional<CostPoint> cost;
  std::optional<CellFailure> failure;
  std::string log;
};

CellOutput run_packing_cell(const ExperimentSpec& spec, const Network& net, const Cell& cell) {
  CellOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto [m, M] = lengths_at(spec.sweeps[cell.sweep], cell.value);
  Instance inst = generate(spec, net, m, M, cell.seed);
  inst.params.seed = cell.seed;
  const PackingProblem problem = make_packing_problem(net, inst);
  const OptResult opt =
      problem.size() <= spec.exact_cap ? opt_bruteforce(problem) : opt_bnb(problem, spec.opt_time_limit);
  const UtilStats opt_util = utilization_stats(problem, opt.selection, net);
  const auto t_opt = std::chrono::steady_clock::now();

  for (const GammaChoice& choice : spec.gammas) {
    const double gamma = choice.resolve(M, m, spec.p_bar);
    const RunReport report = run(net, inst, ExponentialPricing{gamma});
    ExperimentPoint p;
    p.experiment = spec.id;
    p.topology = net.is_line() ? "line" : "tree";
    p.pattern = to_string(spec.pattern);
    p.gamma = gamma;
    p.m = m;
    p.M = M;
    p.p_bar = spec.p_bar;
    p.seed = cell.seed;
    p.n_requests = static_cast<int>(inst.requests.size());
    p.accepted = report.accepted_count;
    p.acceptance_rate = p.n_requests > 0 ? static_cast<double>(p.accepted) / p.n_requests : 0.0;
    p.alg_welfare = report.alg_welfare;
    p.opt_value = opt.value;
    p.opt_exact = opt.exact;
    p.opt_gap = opt.bound_gap;
    p.ratio = empirical_ratio(report, opt);
    p.alg_util = utilization_stats(report.final_utilization, net);
    p.opt_util = opt_util;
    p.eps_ok = report.assumptions_held.eps_le_cmin_over_gamma;
    p.lemma3_holds = !p.eps_ok || lemma3_lower_bound(report, net, gamma).holds;
    p.bound = reference_bound(net, spec.pattern, gamma, M, m, spec.p_bar);
    out.points.push_back(std::move(p));
  }
  const auto t1 = std::chrono::steady_clock::now();
  std::ostringstream log;
  log << cell.key << " requests=" << inst.requests.size() << " opt=" << format_double(opt.value)
      << " exact=" << opt.exact << " gap=" << format_double(opt.bound_gap) << " nodes=" << opt.nodes
      << " lp_fallback=" << opt.lp_fallback
      << " opt_seconds=" << std::chrono::duration<double>(t_opt - t0).count()
      << " total_seconds=" << std::chrono::duration<double>(t1 - t0).count();
  out.log = log.str();
  return out;
}

CellOutput run_cost_cell(const ExperimentSpec& spec, const Cell& cell) {
  CellOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  out.cost = evaluate_cost_point(spec.topology.capacity, cell.value, spec.cost_tol, spec.cost_steps,
                                 spec.cost_eps_factor);
  std::ostringstream log;
  log << cell.key << " min_gamma=" << format_double(out.cost->min_gamma.gamma)
      << " ratio=" << format_double(out.cost->worst_ratio)
      << " seconds=" << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.log = log.str();
  return out;
}

template <typename T>
void read_if(const json& doc, const char* key, T& target) {
  if (doc.contains(key)) target = doc.at(key).get<T>();
}

std::string stem_of(const std::string& path) {
  const std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

}  // namespace

Network build_network(const TopologySpec& t) {
  if (t.kind == "line") {
    if (t.profile != "uniform") throw ValidationError("line topologies take a uniform profile");
    return build_line(t.nodes, UniformCapacity{t.capacity});
  }
  if (t.kind == "tree") {
    if (t.profile == "uniform") return build_tree(t.depth, t.branching, UniformCapacity{t.capacity});
    if (t.profile == "expdecay") return build_tree(t.depth, t.branching, ExpDecayCapacity{t.capacity});
    throw ValidationError("unknown tree profile '" + t.profile + "'");
  }
  throw ValidationError("unknown topology kind '" + t.kind + "'");
}

std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::M: return "M";
    case SweepVar::m: return "m";
    case SweepVar::MOverm: return "M/m";
    case SweepVar::PBar: return "p_bar";
  }
  return "?";
}

SweepVar sweep_var_from_string(const std::string& s) {
  if (s == "M") return SweepVar::M;
  if (s == "m") return SweepVar::m;
  if (s == "M/m") return SweepVar::MOverm;
  if (s == "p_bar") return SweepVar::PBar;
  throw ValidationError("unknown sweep variable '" + s + "'");
}

double GammaChoice::resolve(int M, int m, double p_bar) const {
  return order_optimal ? gamma_opt_line(M, m, p_bar) : value;
}

std::string GammaChoice::label() const { return order_optimal ? "opt" : format_double(value); }

std::vector<ExperimentSpec> catalog() {
  std::vector<ExperimentSpec> out;

  ExperimentSpec e2;
  e2.id = "E2";
  e2.figure = "line ratio vs max length";
  e2.description = "line, stochastic requests, m = 1, sweep M";
  e2.topology = {"line", 101, 0, 2, "uniform", 100.0};
  e2.pattern = Pattern::LineStochastic;
  e2.n_requests = 300;
  e2.sweeps = {{SweepVar::M, {5, 10, 20, 30, 40, 50}, 1, 50}};
  e2.gammas = {g(0.5), g(2), g(4)};
  e2.seed_count = 20;
  e2.output = "results/E2.csv";
  out.push_back(e2);

  ExperimentSpec e3;
  e3.id = "E3";
  e3.figure = "tree ratio vs max length";
  e3.description = "binary tree depth 8, source-rooted requests, top capacity 2560 halving per level, sweep M";
  e3.topology = {"tree", 0, 8, 2, "expdecay", 2560.0};
  e3.pattern = Pattern::TreeSR;
  e3.n_requests = 3000;
  e3.sweeps = {{SweepVar::M, range(1, 8), 1, 8}};
  e3.gammas = {g(0.5), g(2), g(4)};
  e3.seed_count = 40;
  e3.output = "results/E3.csv";
  out.push_back(e3);

  ExperimentSpec e4 = e2;
  e4.id = "E4";
  e4.figure = "line ratio vs min length";
  e4.description = "line, stochastic requests, M = 50, sweep m";
  e4.sweeps = {{SweepVar::m, {1, 5, 10, 20, 30, 40, 50}, 1, 50}};
  e4.output = "results/E4.csv";
  out.push_back(e4);

  ExperimentSpec e5 = e3;
  e5.id = "E5";
  e5.figure = "tree ratio vs min length";
  e5.description = "binary tree depth 8, source-rooted requests, M = 8, sweep m";
  e5.sweeps = {{SweepVar::m, range(1, 8), 1, 8}};
  e5.output = "results/E5.csv";
  out.push_back(e5);

  ExperimentSpec e6;
  e6.id = "E6";
  e6.figure = "line hard-instance growth";
  e6.description = "line hard instances, m = 1, sweep M/m";
  e6.topology = {"line", 65, 0, 2, "uniform", 100.0};
  e6.pattern = Pattern::LineHard;
  e6.sweeps = {{SweepVar::MOverm, {2, 4, 8, 16, 32, 64}, 1, 64}};
  e6.gammas = {g(0.5), g(2), g_opt()};
  e6.seed_count = 1;
  e6.output = "results/E6.csv";
  out.push_back(e6);

  ExperimentSpec e7;
  e7.id = "E7";
  e7.figure = "tree hard-instance growth";
  e7.description = "binary tree hard instances, sweep m at M = 8 and sweep M at m = 1";
  e7.topology = {"tree", 0, 8, 2, "expdecay", 256.0};
  e7.pattern = Pattern::TreeHard;
  e7.sweeps = {{SweepVar::m, range(1, 8), 1, 8}, {SweepVar::M, range(1, 8), 1, 8}};
  e7.gammas = {g(0.5), g(2), g_opt()};
  e7.seed_count = 1;
  e7.output = "results/E7.csv";
  out.push_back(e7);

  ExperimentSpec e8;
  e8.id = "E8";
  e8.figure = "cost-case min gamma vs p_bar";
  e8.description = "congestion-cost pricing: smallest feasible gamma vs p_bar at capacity 40";
  e8.topology = {"line", 2, 0, 2, "uniform", 40.0};
  e8.pattern = Pattern::CostWorst;
  e8.sweeps = {{SweepVar::PBar, {2, 4, 8, 16, 32, 64, 128}, 1, 1}};
  e8.seed_count = 1;
  e8.output = "results/E8.csv";
  out.push_back(e8);
  return out;
}

ExperimentSpec catalog_spec(const std::string& id) {
  for (ExperimentSpec& s : catalog())
    if (s.id == id) return s;
  throw ValidationError("no catalog experiment named '" + id + "'");
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.sweeps.empty()) throw ValidationError("spec " + spec.id + " has no sweeps");
  if (spec.seed_count < 1) throw ValidationError("seed count must be positive");
  if (!(spec.p_bar >= 1.0)) throw ValidationError("p_bar must be >= 1");
  if (!(spec.rate > 0.0)) throw ValidationError("rate must be positive");
  if (!(spec.opt_time_limit > 0.0)) throw ValidationError("time limit must be positive");
  const Network net = build_network(spec.topology);
  for (const SweepSpec& s : spec.sweeps) {
    if (s.values.empty()) throw ValidationError("empty sweep grid");
    if (spec.pattern == Pattern::CostWorst) {
      if (s.var != SweepVar::PBar) throw ValidationError("cost experiments sweep p_bar");
      for (double v : s.values)
        if (!(v * spec.topology.capacity > 1.0)) throw ValidationError("p_bar * capacity must exceed 1");
      continue;
    }
    if (s.var == SweepVar::PBar) throw ValidationError("p_bar sweeps are only for cost experiments");
    for (double v : s.values) {
      const auto [m, M] = lengths_at(s, v);
      if (m < 1 || M < m) throw ValidationError("sweep point gives invalid lengths m=" + std::to_string(m) +
                                                " M=" + std::to_string(M));
      const int limit = net.is_line() ? net.edge_count() : net.tree().depth;
      if (M > limit) throw ValidationError("M=" + std::to_string(M) + " exceeds the topology");
    }
  }
  if (spec.pattern != Pattern::CostWorst && spec.gammas.empty()) throw ValidationError("empty gamma set");
  for (const GammaChoice& gc : spec.gammas)
    if (!gc.order_optimal && !(gc.value > 0.0)) throw ValidationError("gamma must be positive");
}

void apply_document(ExperimentSpec& spec, const json& doc) {
  static const std::vector<std::string> known{
      "id",    "figure", "description", "topology", "pattern", "requests", "p_bar", "rate", "sweeps",
      "gammas", "seeds", "opt",         "hard",     "cost",    "output"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ValidationError("unknown spec key '" + key + "'");
  try {
    read_if(doc, "id", spec.id);
    read_if(doc, "figure", spec.figure);
    read_if(doc, "description", spec.description);
    if (doc.contains("topology")) {
      const json& t = doc.at("topology");
      read_if(t, "kind", spec.topology.kind);
      read_if(t, "nodes", spec.topology.nodes);
      read_if(t, "depth", spec.topology.depth);
      read_if(t, "branching", spec.topology.branching);
      read_if(t, "profile", spec.topology.profile);
      read_if(t, "capacity", spec.topology.capacity);
    }
    if (doc.contains("pattern")) spec.pattern = pattern_from_string(doc.at("pattern").get<std::string>());
    read_if(doc, "requests", spec.n_requests);
    read_if(doc, "p_bar", spec.p_bar);
    read_if(doc, "rate", spec.rate);
    if (doc.contains("sweeps")) {
      spec.sweeps.clear();
      for (const json& s : doc.at("sweeps")) {
        SweepSpec sw;
        sw.var = sweep_var_from_string(s.at("var").get<std::string>());
        sw.values = s.at("values").get<std::vector<double>>();
        read_if(s, "m", sw.fixed_m);
        read_if(s, "M", sw.fixed_M);
        spec.sweeps.push_back(std::move(sw));
      }
    }
    if (doc.contains("gammas")) {
      spec.gammas.clear();
      for (const json& gv : doc.at("gammas")) {
        if (gv.is_string()) {
          if (gv.get<std::string>() != "opt") throw ValidationError("gamma entries are numbers or \"opt\"");
          spec.gammas.push_back(g_opt());
        } else {
          spec.gammas.push_back(g(gv.get<double>()));
        }
      }
    }
    if (doc.contains("seeds")) {
      read_if(doc.at("seeds"), "count", spec.seed_count);
      read_if(doc.at("seeds"), "base", spec.seed_base);
    }
    if (doc.contains("opt")) {
      read_if(doc.at("opt"), "time_limit", spec.opt_time_limit);
      read_if(doc.at("opt"), "exact_cap", spec.exact_cap);
    }
    if (doc.contains("hard")) read_if(doc.at("hard"), "fill_per_step", spec.fill_per_step);
    if (doc.contains("cost")) {
      read_if(doc.at("cost"), "tol", spec.cost_tol);
      read_if(doc.at("cost"), "steps", spec.cost_steps);
      read_if(doc.at("cost"), "eps_factor", spec.cost_eps_factor);
    }
    read_if(doc, "output", spec.output);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed spec document: ") + e.what());
  }
}

ExperimentSpec load_spec(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("spec document must be a JSON object");
  ExperimentSpec spec;
  if (doc.contains("id") && doc.at("id").is_string()) {
    const std::string id = doc.at("id").get<std::string>();
    for (const ExperimentSpec& s : catalog())
      if (s.id == id) spec = s;
  }
  apply_document(spec, doc);
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  json doc;
  doc["id"] = spec.id;
  doc["figure"] = spec.figure;
  doc["description"] = spec.description;
  doc["topology"] = {{"kind", spec.topology.kind},           {"nodes", spec.topology.nodes},
                     {"depth", spec.topology.depth},         {"branching", spec.topology.branching},
                     {"profile", spec.topology.profile},     {"capacity", spec.topology.capacity}};
  doc["pattern"] = to_string(spec.pattern);
  doc["requests"] = spec.n_requests;
  doc["p_bar"] = spec.p_bar;
  doc["rate"] = spec.rate;
  doc["sweeps"] = json::array();
  for (const SweepSpec& s : spec.sweeps)
    doc["sweeps"].push_back({{"var", to_string(s.var)}, {"values", s.values}, {"m", s.fixed_m}, {"M", s.fixed_M}});
  doc["gammas"] = json::array();
  for (const GammaChoice& gc : spec.gammas) {
    if (gc.order_optimal) doc["gammas"].push_back("opt");
    else doc["gammas"].push_back(gc.value);
  }
  doc["seeds"] = {{"count", spec.seed_count}, {"base", spec.seed_base}};
  doc["opt"] = {{"time_limit", spec.opt_time_limit}, {"exact_cap", spec.exact_cap}};
  doc["hard"] = {{"fill_per_step", spec.fill_per_step}};
  doc["cost"] = {{"tol", spec.cost_tol}, {"steps", spec.cost_steps}, {"eps_factor", spec.cost_eps_factor}};
  doc["output"] = spec.output;
  return doc;
}

CostPoint evaluate_cost_point(double capacity, double p_bar, double tol, int steps, double eps_factor) {
  CostPoint out;
  out.capacity = capacity;
  out.p_bar = p_bar;
  out.min_gamma = min_gamma(capacity, p_bar, tol);
  const BvpSolution sol = integrate_bvp(out.min_gamma.gamma, capacity, p_bar);
  const TabulatedPricing pricing = export_pricing_table(sol);
  const double eps = capacity * eps_factor;
  const Network net = cost_worst_network(capacity);
  const Instance inst = gen_cost_worst_instance(p_bar, capacity, eps, steps);
  const RunReport report = run_with_cost(net, inst, pricing);
  out.worst_requests = static_cast<int>(inst.requests.size());
  out.worst_opt = opt_cost_worst(p_bar, eps, capacity);
  out.worst_alg = report.alg_welfare;
  out.worst_ratio = empirical_ratio(report.alg_welfare, out.worst_opt, true);
  return out;
}

void write_cost_csv(std::ostream& out, const std::vector<CostPoint>& points) {
  out << "capacity,p_bar,min_gamma,infeasible_gamma,equality_gamma,phi_end,residual_max,delta_sensitivity,"
         "converged,worst_requests,worst_opt,worst_alg,worst_ratio\n";
  for (const CostPoint& p : points) {
    const MinGammaResult& r = p.min_gamma;
    out << format_double(p.capacity) << ',' << format_double(p.p_bar) << ',' << format_double(r.gamma) << ','
        << format_double(r.gamma_infeasible) << ',' << format_double(r.equality_gamma) << ','
        << format_double(r.phi_end) << ',' << format_double(r.residual_max) << ','
        << format_double(r.delta_sensitivity) << ',' << (r.converged ? 1 : 0) << ',' << p.worst_requests << ','
        << format_double(p.worst_opt) << ',' << format_double(p.worst_alg) << ',' << format_double(p.worst_ratio)
        << '\n';
  }
}

int worker_count() {
  if (const char* env = std::getenv("PATHPRICE_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult execute(const ExperimentSpec& spec, int workers) {
  validate_spec(spec);
  const Network net = build_network(spec.topology);
  const bool cost = spec.pattern == Pattern::CostWorst;

  std::vector<Cell> cells;
  for (std::size_t s = 0; s < spec.sweeps.size(); ++s) {
    for (double v : spec.sweeps[s].values) {
      const int seeds = cost ? 1 : spec.seed_count;
      for (int k = 0; k < seeds; ++k) {
        Cell c;
        c.sweep = s;
        c.value = v;
        c.seed = spec.seed_base + static_cast<std::uint64_t>(k);
        std::ostringstream key;
        key << spec.id << " sweep" << s << ' ' << to_string(spec.sweeps[s].var) << '=' << format_double(v);
        if (!cost) key << " seed=" << c.seed;
        c.key = key.str();
        cells.push_back(std::move(c));
      }
    }
  }

  std::vector<CellOutput> outputs(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      try {
        outputs[i] = cost ? run_cost_cell(spec, cells[i]) : run_packing_cell(spec, net, cells[i]);
      } catch (const std::exception& e) {
        outputs[i].failure = CellFailure{cells[i].key, e.what()};
        outputs[i].log = cells[i].key + " FAILED: " + e.what();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers > 0 ? workers : worker_count(),
                                                  static_cast<int>(cells.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  ExperimentResult result;
  for (CellOutput& o : outputs) {
    for (ExperimentPoint& p : o.points) result.points.push_back(std::move(p));
    if (o.cost) result.cost_points.push_back(*o.cost);
    if (o.failure) result.failures.push_back(*o.failure);
    result.log.push_back(std::move(o.log));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
  ExperimentResult result = execute(spec, workers);
  if (spec.output.empty()) return result;

  const std::filesystem::path out_path(spec.output);
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << "# generated " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << " experiment " << spec.id
        << '\n';

  std::ofstream csv(spec.output);
  if (!csv) throw ValidationError("cannot write " + spec.output);
  csv << stamp.str();
  if (spec.pattern == Pattern::CostWorst) {
    write_cost_csv(csv, result.cost_points);
  } else {
    write_points_csv(csv, result.points);
    std::ofstream agg(stem_of(spec.output) + "_aggregate.csv");
    agg << stamp.str();
    const std::vector<std::string> keys{"experiment", "pattern", "gamma", "m", "M", "p_bar"};
    write_aggregate_csv(agg, aggregate(result.points, keys), keys);
  }

  std::ofstream log(stem_of(spec.output) + ".log");
  log << stamp.str();
  for (const std::string& line : result.log) log << line << '\n';
  log << "cells=" << result.log.size() << " failures=" << result.failures.size() << '\n';
  return result;
}

}  // namespace pathprice
