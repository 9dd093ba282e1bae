#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pathprice/arrivals.hpp"
#include "pathprice/mechanism.hpp"
#include "pathprice/metrics.hpp"
#include "pathprice/offline.hpp"

using namespace pathprice;

namespace {

ExperimentPoint point(double gamma, int M, std::uint64_t seed, double ratio) {
  ExperimentPoint p;
  p.experiment = "X";
  p.topology = "line";
  p.pattern = "line_stochastic";
  p.gamma = gamma;
  p.M = M;
  p.m = 1;
  p.p_bar = 6;
  p.seed = seed;
  p.n_requests = 10;
  p.accepted = static_cast<int>(seed % 10);
  p.acceptance_rate = p.accepted / 10.0;
  p.alg_welfare = 1.0;
  p.opt_value = ratio;
  p.ratio = ratio;
  p.alg_util = {0.1, 0.2 + 0.01 * static_cast<double>(seed), 0.9};
  p.opt_util = {0.0, 0.5, 1.0};
  p.eps_ok = true;
  p.bound = 12.5;
  return p;
}

}  // namespace

TEST(Ratio, Conventions) {
  EXPECT_EQ(empirical_ratio(1.0, 2.0), 2.0);
  EXPECT_EQ(empirical_ratio(0.0, 0.0), 1.0);
  EXPECT_TRUE(std::isinf(empirical_ratio(0.0, 3.0)));
  EXPECT_THROW(empirical_ratio(-1.0, 3.0), InvariantError);
  EXPECT_NO_THROW(empirical_ratio(-1.0, 3.0, true));
}

TEST(Ratio, FromReports) {
  const Network net = build_line(2, UniformCapacity{1});
  Instance inst;
  Request a;
  a.id = 0;
  a.rate = 1;
  a.value = 1;
  a.dest = 1;
  a.path = Path{{0}};
  Request b = a;
  b.id = 1;
  b.value = 2;
  inst.params.p_bar = 2;
  inst.requests = {a, b};
  const RunReport rep = run(net, inst, ExponentialPricing{2.0});
  const OptResult opt = opt_bruteforce(make_packing_problem(net, inst));
  EXPECT_EQ(empirical_ratio(rep, opt), 2.0);

  const RunReport empty = run(net, Instance{}, ExponentialPricing{2.0});
  EXPECT_EQ(empirical_ratio(empty, opt_bruteforce(make_packing_problem(net, Instance{}))), 1.0);
}

TEST(Ratio, EqualWhenMechanismMatchesOpt) {
  const Network net = build_line(7, UniformCapacity{100});
  const Instance inst = gen_line_stochastic(net, 20, 1, 3, 6.0, 1.0, 1);
  const RunReport rep = run(net, inst, ExponentialPricing{1.0});
  EXPECT_EQ(rep.accepted_count, 20);
  EXPECT_EQ(empirical_ratio(rep, opt_bnb(make_packing_problem(net, inst))), 1.0);
}

TEST(Utilization, Reducer) {
  const Network net = build_line(5, UniformCapacity{2});
  const UtilStats zero = utilization_stats(Eigen::VectorXd::Zero(4), net);
  EXPECT_EQ(zero.min, 0.0);
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.max, 0.0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
  w[2] = 2.0;
  const UtilStats one = utilization_stats(w, net);
  EXPECT_EQ(one.max, 1.0);
  EXPECT_DOUBLE_EQ(one.mean, 0.25);
  EXPECT_EQ(one.min, 0.0);
}

TEST(Utilization, OptSelectionSharesReducer) {
  const Network net = build_line(11, UniformCapacity{3});
  const Instance inst = gen_line_stochastic(net, 15, 1, 4, 6.0, 1.0, 9);
  const PackingProblem p = make_packing_problem(net, inst);
  const OptResult opt = opt_bnb(p);
  const UtilStats a = utilization_stats(p, opt.selection, net);
  const UtilStats b = utilization_stats(selection_load(p, opt.selection), net);
  EXPECT_EQ(a.min, b.min);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.max, b.max);
  EXPECT_LE(a.max, 1.0 + 1e-9);
}

TEST(Aggregate, SinglePointGroup) {
  const auto rows = aggregate({point(2.0, 5, 1, 1.5)}, {"gamma", "M"});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].count, 1);
  EXPECT_EQ(rows[0].ratio.mean, 1.5);
  EXPECT_EQ(rows[0].ratio.sd, 0.0);
  EXPECT_EQ(rows[0].key.at("gamma"), "2");
}

TEST(Aggregate, OneRowPerCellAndInfinitiesCounted) {
  std::vector<ExperimentPoint> pts;
  for (double g : {0.5, 2.0, 4.0})
    for (int M : {5, 10, 20})
      for (std::uint64_t s = 1; s <= 20; ++s) pts.push_back(point(g, M, s, 1.0 + 0.01 * static_cast<double>(s)));
  pts.push_back(point(4.0, 20, 21, std::numeric_limits<double>::infinity()));
  const auto rows = aggregate(pts, {"gamma", "M"});
  ASSERT_EQ(rows.size(), 9u);
  // Numeric-aware ordering: 5 before 10 before 20.
  EXPECT_EQ(rows[0].key.at("M"), "5");
  EXPECT_EQ(rows[1].key.at("M"), "10");
  EXPECT_EQ(rows.back().count, 21);
  EXPECT_EQ(rows.back().infinite_ratios, 1);
  EXPECT_NEAR(rows.back().ratio.mean, 1.105, 1e-12);
  EXPECT_TRUE(std::isfinite(rows.back().ratio.mean));
}

TEST(Aggregate, PermutationInvariant) {
  std::vector<ExperimentPoint> pts;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(1.0, 3.0);
  for (int M : {5, 10})
    for (std::uint64_t s = 1; s <= 30; ++s) pts.push_back(point(2.0, M, s, u(rng)));
  std::ostringstream a;
  write_aggregate_csv(a, aggregate(pts, {"M"}), {"M"});
  for (int t = 0; t < 5; ++t) {
    std::shuffle(pts.begin(), pts.end(), rng);
    std::ostringstream b;
    write_aggregate_csv(b, aggregate(pts, {"M"}), {"M"});
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Aggregate, BadKeyRejected) { EXPECT_THROW(aggregate({point(1, 1, 1, 1)}, {"colour"}), ValidationError); }

TEST(PointsCsv, RoundTrip) {
  std::vector<ExperimentPoint> pts{point(0.5, 5, 1, 1.25), point(2.0, 10, 2, std::numeric_limits<double>::infinity())};
  pts[1].opt_exact = false;
  pts[1].opt_gap = 0.3;
  pts[1].gamma = 12.493998784;
  std::ostringstream out;
  out << "# generated for a test\n";
  write_points_csv(out, pts);
  std::istringstream in(out.str());
  const auto back = read_points_csv(in);
  ASSERT_EQ(back.size(), 2u);
  std::ostringstream again;
  write_points_csv(again, back);
  std::ostringstream plain;
  write_points_csv(plain, pts);
  EXPECT_EQ(again.str(), plain.str());
  EXPECT_TRUE(std::isinf(back[1].ratio));
  EXPECT_FALSE(back[1].opt_exact);
  EXPECT_EQ(back[1].gamma, 12.493998784);
}

TEST(PointsCsv, MissingColumnNamed) {
  std::ostringstream out;
  write_points_csv(out, {point(1, 1, 1, 1)});
  std::string text = out.str();
  const auto pos = text.find(",ratio,");
  text.replace(pos, 7, ",ratiox,");
  std::istringstream in(text);
  try {
    read_points_csv(in);
    FAIL() << "expected a ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'ratio'"), std::string::npos);
  }
}

TEST(PointsCsv, BadCellRejected) {
  std::ostringstream out;
  write_points_csv(out, {point(1, 1, 1, 1)});
  std::string text = out.str();
  text += "X,line,p,abc,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1\n";
  std::istringstream in(text);
  EXPECT_THROW(read_points_csv(in), ValidationError);
  std::istringstream short_row(out.str() + "X,line\n");
  EXPECT_THROW(read_points_csv(short_row), ValidationError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(x)), x);
}
