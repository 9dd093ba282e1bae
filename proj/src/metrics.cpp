#include "pathprice/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "pathprice/errors.hpp"

namespace pathprice {

namespace {

Moments moments(const std::vector<double>& xs) {
  Moments out;
  if (xs.empty()) {
    out.mean = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string key_value(const ExperimentPoint& p, const std::string& key) {
  if (key == "experiment") return p.experiment;
  if (key == "topology") return p.topology;
  if (key == "pattern") return p.pattern;
  if (key == "gamma") return format_double(p.gamma);
  if (key == "m") return std::to_string(p.m);
  if (key == "M") return std::to_string(p.M);
  if (key == "p_bar") return format_double(p.p_bar);
  throw ValidationError("unknown group key '" + key + "'");
}

// Numeric-aware ordering so "10" sorts after "4".
bool key_less(const std::string& a, const std::string& b) {
  double x = 0.0, y = 0.0;
  const auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
  const auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
  const bool na = ra.ec == std::errc() && ra.ptr == a.data() + a.size();
  const bool nb = rb.ec == std::errc() && rb.ptr == b.data() + b.size();
  if (na && nb && x != y) return x < y;
  return a < b;
}

auto canonical_tuple(const ExperimentPoint& p) {
  return std::make_tuple(p.seed, p.experiment, p.topology, p.pattern, p.gamma, p.m, p.M, p.p_bar, p.ratio,
                         p.alg_welfare, p.opt_value);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& column, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line) + ": column '" + column + "' is not a number: '" + s + "'");
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double empirical_ratio(double alg_welfare, double opt_value, bool has_cost) {
  if (alg_welfare < 0.0 && !has_cost) throw InvariantError("negative welfare in a run without congestion cost");
  if (alg_welfare <= 0.0) {
    if (opt_value <= 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return opt_value / alg_welfare;
}

double empirical_ratio(const RunReport& run, const OptResult& opt) {
  return empirical_ratio(run.alg_welfare, opt.value, run.cost_total != 0.0);
}

UtilStats utilization_stats(const Eigen::VectorXd& utilization, const Network& net) {
  if (utilization.size() != net.edge_count()) throw ValidationError("utilization vector does not match the network");
  if (utilization.size() == 0) return {};
  const Eigen::VectorXd rho = utilization.cwiseQuotient(net.capacities());
  return {rho.minCoeff(), rho.mean(), rho.maxCoeff()};
}

UtilStats utilization_stats(const PackingProblem& problem, const std::vector<int>& selection, const Network& net) {
  return utilization_stats(selection_load(problem, selection), net);
}

const std::vector<std::string>& point_columns() {
  static const std::vector<std::string> cols{
      "experiment",    "topology",      "pattern",      "gamma",        "m",
      "M",             "p_bar",         "seed",         "n_requests",   "accepted",
      "acceptance",    "alg_welfare",   "opt_value",    "opt_exact",    "opt_gap",
      "ratio",         "alg_util_min",  "alg_util_mean", "alg_util_max", "opt_util_min",
      "opt_util_mean", "opt_util_max",  "eps_ok",       "lemma3_holds", "bound"};
  return cols;
}

void write_points_csv(std::ostream& out, const std::vector<ExperimentPoint>& points, bool header) {
  if (header) {
    const auto& cols = point_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
  }
  for (const ExperimentPoint& p : points) {
    out << p.experiment << ',' << p.topology << ',' << p.pattern << ',' << format_double(p.gamma) << ',' << p.m
        << ',' << p.M << ',' << format_double(p.p_bar) << ',' << p.seed << ',' << p.n_requests << ','
        << p.accepted << ',' << format_double(p.acceptance_rate) << ',' << format_double(p.alg_welfare) << ','
        << format_double(p.opt_value) << ',' << (p.opt_exact ? 1 : 0) << ',' << format_double(p.opt_gap) << ','
        << format_double(p.ratio) << ',' << format_double(p.alg_util.min) << ',' << format_double(p.alg_util.mean)
        << ',' << format_double(p.alg_util.max) << ',' << format_double(p.opt_util.min) << ','
        << format_double(p.opt_util.mean) << ',' << format_double(p.opt_util.max) << ',' << (p.eps_ok ? 1 : 0)
        << ',' << (p.lemma3_holds ? 1 : 0) << ',' << format_double(p.bound) << '\n';
  }
}

std::vector<ExperimentPoint> read_points_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  for (const std::string& col : point_columns())
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw ValidationError("results CSV is missing column '" + col + "'");

  std::vector<ExperimentPoint> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw ValidationError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                            " cells, found " + std::to_string(cells.size()));
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    auto num = [&](const std::string& c) { return parse_double(row[c], c, lineno); };
    auto flag = [&](const std::string& c) {
      const std::string& v = row[c];
      if (v != "0" && v != "1")
        throw ValidationError("line " + std::to_string(lineno) + ": column '" + c + "' must be 0 or 1");
      return v == "1";
    };
    ExperimentPoint p;
    p.experiment = row["experiment"];
    p.topology = row["topology"];
    p.pattern = row["pattern"];
    p.gamma = num("gamma");
    p.m = static_cast<int>(num("m"));
    p.M = static_cast<int>(num("M"));
    p.p_bar = num("p_bar");
    p.seed = std::stoull(row["seed"]);
    p.n_requests = static_cast<int>(num("n_requests"));
    p.accepted = static_cast<int>(num("accepted"));
    p.acceptance_rate = num("acceptance");
    p.alg_welfare = num("alg_welfare");
    p.opt_value = num("opt_value");
    p.opt_exact = flag("opt_exact");
    p.opt_gap = num("opt_gap");
    p.ratio = num("ratio");
    p.alg_util = {num("alg_util_min"), num("alg_util_mean"), num("alg_util_max")};
    p.opt_util = {num("opt_util_min"), num("opt_util_mean"), num("opt_util_max")};
    p.eps_ok = flag("eps_ok");
    p.lemma3_holds = flag("lemma3_holds");
    p.bound = num("bound");
    if (p.acceptance_rate < 0.0 || p.acceptance_rate > 1.0)
      throw ValidationError("line " + std::to_string(lineno) + ": acceptance outside [0, 1]");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<ExperimentPoint>& points,
                                    const std::vector<std::string>& group_keys) {
  std::vector<std::pair<std::vector<std::string>, const ExperimentPoint*>> keyed;
  keyed.reserve(points.size());
  for (const ExperimentPoint& p : points) {
    std::vector<std::string> k;
    for (const std::string& g : group_keys) k.push_back(key_value(p, g));
    keyed.emplace_back(std::move(k), &p);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first)
      return std::lexicographical_compare(a.first.begin(), a.first.end(), b.first.begin(), b.first.end(), key_less);
    return canonical_tuple(*a.second) < canonical_tuple(*b.second);
  });

  std::vector<AggregateRow> rows;
  std::size_t i = 0;
  while (i < keyed.size()) {
    std::size_t j = i;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    AggregateRow row;
    for (std::size_t k = 0; k < group_keys.size(); ++k) row.key[group_keys[k]] = keyed[i].first[k];
    std::vector<double> ratio, acc, amin, amean, amax, omin, omean, omax;
    for (std::size_t t = i; t < j; ++t) {
      const ExperimentPoint& p = *keyed[t].second;
      ++row.count;
      if (!p.opt_exact) ++row.inexact_opt;
      if (std::isinf(p.ratio)) ++row.infinite_ratios;
      else ratio.push_back(p.ratio);
      acc.push_back(p.acceptance_rate);
      amin.push_back(p.alg_util.min);
      amean.push_back(p.alg_util.mean);
      amax.push_back(p.alg_util.max);
      omin.push_back(p.opt_util.min);
      omean.push_back(p.opt_util.mean);
      omax.push_back(p.opt_util.max);
    }
    row.ratio = moments(ratio);
    row.acceptance = moments(acc);
    row.alg_util_min = moments(amin);
    row.alg_util_mean = moments(amean);
    row.alg_util_max = moments(amax);
    row.opt_util_min = moments(omin);
    row.opt_util_mean = moments(omean);
    row.opt_util_max = moments(omax);
    rows.push_back(std::move(row));
    i = j;
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const std::vector<std::string>& group_keys) {
  for (const std::string& k : group_keys) out << k << ',';
  out << "count,infinite_ratios,inexact_opt,ratio_mean,ratio_sd,acceptance_mean,acceptance_sd,"
         "alg_util_min_mean,alg_util_mean_mean,alg_util_max_mean,alg_util_max_sd,"
         "opt_util_min_mean,opt_util_mean_mean,opt_util_max_mean,opt_util_max_sd\n";
  for (const AggregateRow& r : rows) {
    for (const std::string& k : group_keys) out << r.key.at(k) << ',';
    out << r.count << ',' << r.infinite_ratios << ',' << r.inexact_opt << ',' << format_double(r.ratio.mean) << ','
        << format_double(r.ratio.sd) << ',' << format_double(r.acceptance.mean) << ','
        << format_double(r.acceptance.sd) << ',' << format_double(r.alg_util_min.mean) << ','
        << format_double(r.alg_util_mean.mean) << ',' << format_double(r.alg_util_max.mean) << ','
        << format_double(r.alg_util_max.sd) << ',' << format_double(r.opt_util_min.mean) << ','
        << format_double(r.opt_util_mean.mean) << ',' << format_double(r.opt_util_max.mean) << ','
        << format_double(r.opt_util_max.sd) << '\n';
  }
}

}  // namespace pathprice
