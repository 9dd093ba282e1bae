// Command-line front end: experiment catalog, runs, instance validation,
// pricing ODE solves and reference bound curves.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathprice/arrivals.hpp"
#include "pathprice/cost.hpp"
#include "pathprice/errors.hpp"
#include "pathprice/harness.hpp"
#include "pathprice/metrics.hpp"
#include "pathprice/theory.hpp"

using namespace pathprice;

namespace {

ExperimentSpec resolve_spec(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    return load_spec(in);
  }
  return catalog_spec(arg);
}

std::vector<double> parse_grid(const std::string& text) {
  // lo:hi:count
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 3 || parts[2] < 2) throw ValidationError("grid must look like lo:hi:count with count >= 2");
  std::vector<double> out;
  const int n = static_cast<int>(parts[2]);
  for (int i = 0; i < n; ++i) out.push_back(parts[0] + (parts[1] - parts[0]) * i / (n - 1));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posted-price path selection: simulations, offline optima, bounds and pricing ODE"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Show the built-in experiment catalog");
  bool list_json = false;
  list->add_flag("--json", list_json, "Print full specs as JSON");

  auto* run_cmd = app.add_subcommand("run", "Run a catalog experiment or a JSON spec document");
  std::string spec_arg;
  std::optional<std::string> out_path;
  std::optional<int> seeds, requests, workers;
  std::optional<std::uint64_t> seed_base;
  std::optional<double> time_limit;
  run_cmd->add_option("spec", spec_arg, "Catalog id (E2..E8) or path to a spec document")->required();
  run_cmd->add_option("-o,--out", out_path, "Results CSV path");
  run_cmd->add_option("--seeds", seeds, "Number of seeds per cell");
  run_cmd->add_option("--seed-base", seed_base, "First seed");
  run_cmd->add_option("--requests", requests, "Requests per stochastic instance");
  run_cmd->add_option("--time-limit", time_limit, "Branch-and-bound time limit per instance (s)");
  run_cmd->add_option("--workers", workers, "Worker threads (default: PATHPRICE_WORKERS or all cores)");

  auto* validate = app.add_subcommand("validate", "Check a saved instance against the model assumptions");
  std::string instance_path;
  validate->add_option("instance", instance_path, "Instance file (line-oriented JSON)")->required()->check(
      CLI::ExistingFile);

  auto* generate = app.add_subcommand("generate", "Write one instance of a catalog experiment");
  std::string gen_spec;
  int gen_m = 1, gen_M = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  generate->add_option("spec", gen_spec, "Catalog id or spec document")->required();
  generate->add_option("--m", gen_m, "Minimum path length");
  generate->add_option("--M", gen_M, "Maximum path length");
  generate->add_option("--seed", gen_seed, "Seed");
  generate->add_option("-o,--out", gen_out, "Output file (default stdout)");

  auto* bvp = app.add_subcommand("bvp", "Solve the congestion-cost pricing ODE");
  double bvp_c = 40.0, bvp_p = 6.0, bvp_tol = 1e-3, bvp_delta = 1e-5, bvp_step = 0.0;
  std::optional<double> bvp_gamma;
  std::string bvp_csv;
  int bvp_stride = 100;
  bvp->add_option("C", bvp_c, "Edge capacity")->required();
  bvp->add_option("p_bar", bvp_p, "Largest value density")->required();
  bvp->add_option("--gamma", bvp_gamma, "Integrate at this gamma instead of searching for the smallest");
  bvp->add_option("--tol", bvp_tol, "Bisection tolerance");
  bvp->add_option("--delta", bvp_delta, "Start offset from rho = 0");
  bvp->add_option("--step", bvp_step, "Integrator step (default 1e-5 * rho_bar)");
  bvp->add_option("--csv", bvp_csv, "Write the (rho, phi) grid here");
  bvp->add_option("--stride", bvp_stride, "Keep every n-th grid point in the CSV");

  auto* bounds = app.add_subcommand("bounds", "Evaluate a competitive-ratio bound family");
  std::string family_name;
  BoundParams bp;
  std::string gamma_grid;
  bool below_m_levels = false;
  bounds->add_option("family", family_name,
                     "line_uniform | line_hetero | tree_sr_uniform | tree_sr_expdecay | tree_el_uniform | "
                     "tree_el_expdecay")
      ->required();
  bounds->add_option("--M", bp.M, "Maximum path length")->required();
  bounds->add_option("--m", bp.m, "Minimum path length");
  bounds->add_option("--p-bar", bp.p_bar, "Largest value density");
  bounds->add_option("--beta", bp.beta, "Capacity ratio (line_hetero)");
  bounds->add_option("--gamma", bp.gamma, "Pricing aggressiveness");
  bounds->add_option("--gamma-grid", gamma_grid, "lo:hi:count; prints a CSV curve and its minimizer");
  bounds->add_flag("--levels-below-m", below_m_levels, "Exp-decay source-rooted: maximize over levels 0..m-1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*list) {
      for (const ExperimentSpec& s : catalog()) {
        if (list_json) std::cout << spec_to_json(s).dump(2) << '\n';
        else std::cout << s.id << "  " << s.figure << "  " << s.description << '\n';
      }
      return 0;
    }

    if (*run_cmd) {
      ExperimentSpec spec = resolve_spec(spec_arg);
      if (out_path) spec.output = *out_path;
      if (seeds) spec.seed_count = *seeds;
      if (seed_base) spec.seed_base = *seed_base;
      if (requests) spec.n_requests = *requests;
      if (time_limit) spec.opt_time_limit = *time_limit;
      if (spec.output.empty()) spec.output = "results/" + spec.id + ".csv";
      const ExperimentResult result = run_experiment(spec, workers.value_or(0));
      std::cout << spec.id << ": " << result.log.size() << " cells, " << result.failures.size() << " failed; wrote "
                << spec.output << '\n';
      for (const CellFailure& f : result.failures) std::cerr << "  " << f.cell << ": " << f.message << '\n';
      return result.failures.empty() ? 0 : 1;
    }

    if (*validate) {
      std::ifstream in(instance_path);
      const LoadedInstance loaded = read_instance(in);
      const auto violations = validate_instance(loaded.instance, loaded.network);
      std::cout << loaded.instance.requests.size() << " requests, " << violations.size() << " violations\n";
      for (const Violation& v : violations)
        std::cout << "  request " << v.request_id << " assumption " << static_cast<int>(v.assumption) << ": "
                  << v.detail << '\n';
      return violations.empty() ? 0 : 1;
    }

    if (*generate) {
      const ExperimentSpec spec = resolve_spec(gen_spec);
      Network net = build_network(spec.topology);
      Instance inst;
      switch (spec.pattern) {
        case Pattern::LineStochastic:
          inst = gen_line_stochastic(net, spec.n_requests, gen_m, gen_M, spec.p_bar, spec.rate, gen_seed);
          break;
        case Pattern::TreeSR:
          inst = gen_tree_sr_stochastic(net, spec.n_requests, gen_m, gen_M, spec.p_bar, spec.rate, gen_seed);
          break;
        case Pattern::TreeEL:
          inst = gen_tree_el_stochastic(net, spec.n_requests, gen_m, gen_M, spec.p_bar, spec.rate, gen_seed);
          break;
        case Pattern::LineHard: inst = gen_line_hard(net, gen_m, gen_M, spec.p_bar, spec.rate, spec.fill_per_step); break;
        case Pattern::TreeHard: inst = gen_tree_hard(net, gen_m, gen_M, spec.p_bar, spec.rate, spec.fill_per_step); break;
        case Pattern::CostWorst:
          net = cost_worst_network(spec.topology.capacity);
          inst = gen_cost_worst_instance(spec.p_bar, spec.topology.capacity,
                                         spec.topology.capacity * spec.cost_eps_factor, spec.cost_steps);
          break;
      }
      if (gen_out.empty()) {
        write_instance(std::cout, inst, net);
      } else {
        std::ofstream out(gen_out);
        write_instance(out, inst, net);
      }
      return 0;
    }

    if (*bvp) {
      BvpOptions opts;
      opts.delta = bvp_delta;
      opts.step = bvp_step;
      double gamma;
      if (bvp_gamma) {
        gamma = *bvp_gamma;
      } else {
        const MinGammaResult r = min_gamma(bvp_c, bvp_p, bvp_tol, opts);
        gamma = r.gamma;
        std::cout << "min_gamma " << format_double(r.gamma) << "\ninfeasible_below " << format_double(r.gamma_infeasible)
                  << "\nequality_gamma " << format_double(r.equality_gamma) << "\ndelta_sensitivity "
                  << format_double(r.delta_sensitivity) << "\nconverged " << (r.converged ? "yes" : "no") << '\n';
      }
      const BvpSolution sol = integrate_bvp(gamma, bvp_c, bvp_p, opts);
      std::cout << "gamma " << format_double(gamma) << "\nrho_bar " << format_double(sol.rho_bar) << "\nphi_end "
                << format_double(sol.phi_end) << "\nfeasible " << (sol.feasible ? "yes" : "no") << "\nresidual_max "
                << format_double(sol.residual_max) << "\nstatus " << sol.stop_reason << '\n';
      if (!bvp_csv.empty()) {
        std::ofstream out(bvp_csv);
        write_bvp_csv(out, sol, bvp_stride);
      }
      return 0;
    }

    if (*bounds) {
      const BoundFamily family = bound_family_from_string(family_name);
      if (below_m_levels) bp.level_range = LevelRange::ZeroToMMinusOne;
      if (!gamma_grid.empty()) {
        const std::vector<double> grid = parse_grid(gamma_grid);
        write_bound_curve_csv(std::cout, family, bp, grid);
        const GammaMinimum best = minimize_over_gamma(family, bp, grid);
        std::cout << "# minimum " << format_double(best.bound) << " at gamma " << format_double(best.gamma) << '\n';
      } else {
        std::cout << format_double(evaluate_bound(family, bp)) << '\n';
      }
      if (family == BoundFamily::LineUniform || family == BoundFamily::LineHetero)
        std::cerr << "order-optimal gamma " << format_double(gamma_opt_line(bp.M, bp.m, bp.p_bar)) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
