#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rvlab/asymptotics.hpp"
#include "rvlab/catalog.hpp"
#include "rvlab/moments.hpp"

using namespace rvlab;

namespace {

std::vector<TailModel> catalog() {
  return {make_pareto(1.5, 1.0), make_pareto(0.7, 2.5), make_st_petersburg(), make_geometric_tail(1.0, 3.0),
          make_geometric_tail(0.5, 10.0), make_inverse_log(), make_log_pareto(0.5, 1.0),
          make_log_pareto(1.0, -2.0)};
}

}  // namespace

TEST(Pareto, TailValues) {
  const auto m = make_pareto(1.5, 1.0);
  EXPECT_NEAR(m(100.0), 1e-3, 1e-18);
  EXPECT_EQ(m(0.5), 1.0);
  EXPECT_EQ(m(1.0), 1.0);
}

TEST(Pareto, GroundTruthIndex) {
  const auto m = make_pareto(1.5, 1.0);
  ASSERT_TRUE(m.ground_truth);
  EXPECT_DOUBLE_EQ(*m.ground_truth->rho(2.0), 0.5);
  EXPECT_FALSE(m.ground_truth->rho(1.0).has_value());

  // Brute-force index of h_2 from two far-out quadrature values.
  const double a = compute_h(m, 2.0, 1e12).value;
  const double b = compute_h(m, 2.0, 4e12).value;
  EXPECT_NEAR(std::log(b / a) / std::log(4.0), 0.5, 1e-5);
}

TEST(Pareto, RejectsBadParameters) {
  EXPECT_THROW(make_pareto(0.0), ValidationError);
  EXPECT_THROW(make_pareto(1.0, -1.0), ValidationError);
}

TEST(Geometric, StPetersburgValues) {
  const auto m = make_st_petersburg();
  EXPECT_EQ(m(3.0), 0.5);
  EXPECT_EQ(m(4.0), 0.25);
  EXPECT_EQ(m(1.9), 1.0);
  const auto atoms = m.point_masses(3.5, 4.0);
  ASSERT_EQ(atoms.size(), 1u);
  EXPECT_EQ(atoms[0].location, 4.0);
  EXPECT_EQ(atoms[0].jump, 0.25);
}

TEST(Geometric, TailWeightStaysInUnitOctave) {
  const auto m = make_st_petersburg();
  for (double t = 1.0; t < 40.0; t += 0.0137) {
    const double x = std::exp2(t);
    const double u = x * m(x);
    EXPECT_GE(u, 1.0) << x;
    EXPECT_LT(u, 2.0) << x;
    EXPECT_DOUBLE_EQ(u, std::exp2(t - std::floor(t))) << x;
  }
}

TEST(Geometric, LogPeriodicTailWeight) {
  // Dyadic case is exact; p = 3 on rational points up to a few ulps.
  const auto m2 = make_st_petersburg();
  for (double x = 2.0; x < 1e6; x = x * 1.37 + 0.25) EXPECT_EQ(2.0 * x * m2(2.0 * x), x * m2(x)) << x;

  const auto m3 = make_geometric_tail(1.0, 3.0);
  for (int num = 7; num < 4000; num += 13) {
    const double x = num / 2.0;
    if (x < 3.0) continue;
    const double a = 3.0 * x * m3(3.0 * x);
    const double b = x * m3(x);
    EXPECT_NEAR(a, b, 8 * std::numeric_limits<double>::epsilon() * b) << x;
  }
}

TEST(Geometric, AtomsSumToOne) {
  const auto m = make_geometric_tail(0.5, 10.0);
  double total = 0.0;
  for (const auto& pm : m.point_masses(0.0, 1e300)) total += pm.jump;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Geometric, RejectsBadParameters) {
  EXPECT_THROW(make_geometric_tail(1.0, 1.0), ValidationError);
  EXPECT_THROW(make_geometric_tail(0.0, 2.0), ValidationError);
}

TEST(InverseLog, TailValues) {
  const auto m = make_inverse_log();
  EXPECT_EQ(m(std::numbers::e), 1.0);
  EXPECT_DOUBLE_EQ(m(std::exp(2.0)), 0.5);
  EXPECT_EQ(m(1.5), 1.0);
}

TEST(LogPareto, DegeneratesToPareto) {
  const auto lp = make_log_pareto(1.0, 0.0);
  const auto p = make_pareto(1.0, std::numbers::e);
  EXPECT_DOUBLE_EQ(lp.support_floor, std::numbers::e);
  for (double x : {1.0, 3.0, 10.0, 1e5, 1e12}) EXPECT_NEAR(lp(x), p(x), 1e-14 * p(x)) << x;
}

TEST(LogPareto, FloorMakesTailMonotone) {
  const auto m = make_log_pareto(0.5, 1.0);
  EXPECT_DOUBLE_EQ(m.support_floor, std::exp(2.0));
  EXPECT_DOUBLE_EQ(m(m.support_floor), 1.0);
  // The unconstrained curve x^-alpha (log x)^a increases below e^(a/alpha).
  const double below = std::exp(1.5);
  EXPECT_GT(std::pow(below * 1.01, -0.5) * std::log(below * 1.01), std::pow(below, -0.5) * std::log(below));
  AnalysisParams p;
  p.x_max = 1e15;
  p.points_per_decade = 64;
  const auto grid = build_grid(m, p);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LE(m(grid[i]), m(grid[i - 1])) << grid[i];
}

TEST(LogPareto, TailIndexApproachesMinusAlpha) {
  const auto m = make_log_pareto(0.5, 1.0);
  AnalysisParams p;
  p.x_max = 1e10;
  const auto grid = build_grid(m, p);
  std::vector<double> tail;
  for (double x : grid) tail.push_back(m(x));
  const auto est = estimate_rv_index(grid, tail, p);
  // Local estimate is -alpha + log(1 + log(lambda)/log x)/log(lambda).
  for (const auto& s : est.per_scale) {
    if (s.interpolated) continue;
    const double expected = -0.5 + std::log1p(std::log(s.lambda) / std::log(s.x)) / std::log(s.lambda);
    EXPECT_NEAR(s.local, expected, 1e-9);
  }
  EXPECT_NEAR(est.rho_hat, -0.5, 0.06);
  EXPECT_GT(est.rho_hat, -0.5);
}

TEST(Tabulated, LogLogInterpolation) {
  std::istringstream in("x,tail\n1,1\n10,0.1\n");
  const auto m = parse_tabulated(in);
  EXPECT_NEAR(m(std::sqrt(10.0)), 0.316227766, 1e-9);
  EXPECT_EQ(m(0.5), 1.0);
  EXPECT_EQ(m(1.0), 1.0);
  EXPECT_DOUBLE_EQ(m(10.0), 0.1);
}

TEST(Tabulated, ConstantExtrapolationIsFlagged) {
  std::istringstream in("\xEF\xBB\xBFx,tail\r\n1,1\r\n10,0.1\r\n100,0.01\r\n");
  const auto m = parse_tabulated(in);
  EXPECT_DOUBLE_EQ(m(1e6), 0.01);
  ASSERT_TRUE(m.extrapolated_beyond);
  EXPECT_EQ(*m.extrapolated_beyond, 100.0);
  EXPECT_EQ(m.warnings.size(), 1u);
  AnalysisParams p;
  p.x_max = 1e4;
  EXPECT_TRUE(build_curve(m, p).extrapolated);
  p.x_max = 50.0;
  EXPECT_FALSE(build_curve(m, p).extrapolated);
}

TEST(Tabulated, NonMonotoneTailNamesRows) {
  std::istringstream in("x,tail\n1,1\n2,0.5\n3,0.7\n4,0.2\n");
  try {
    parse_tabulated(in);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.rows().size(), 1u);
    EXPECT_EQ(e.rows()[0], 4u);
    EXPECT_NE(std::string(e.what()).find("non-increasing"), std::string::npos);
  }
}

TEST(Tabulated, NonIncreasingXRejected) {
  std::istringstream in("x,tail\n1,1\n1,0.5\n");
  EXPECT_THROW(parse_tabulated(in), ValidationError);
}

TEST(Tabulated, MalformedRowReportsLine) {
  std::istringstream in("x,tail\n1,1\n2,abc\n");
  try {
    parse_tabulated(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream three("x,tail\n1,1,3\n");
  EXPECT_THROW(parse_tabulated(three), ParseError);
  std::istringstream header("x;tail\n1,1\n");
  EXPECT_THROW(parse_tabulated(header), ParseError);
  EXPECT_THROW(load_tabulated("/nonexistent/table.csv"), ParseError);
}

TEST(Catalog, TailIsMonotoneOnEveryGrid) {
  AnalysisParams p;
  p.x_max = 1e30;
  for (const auto& m : catalog()) {
    const auto grid = build_grid(m, p);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = m(grid[i]);
      EXPECT_GE(t, 0.0);
      EXPECT_LE(t, 1.0);
      if (i) {
        EXPECT_LE(t, m(grid[i - 1])) << m.name << " at " << grid[i];
      }
      if (grid[i] < m.support_floor) {
        EXPECT_EQ(t, 1.0);
      }
    }
  }
}

TEST(Admission, FiniteMomentIsRejected) {
  AnalysisParams p;
  p.beta = 2.0;
  EXPECT_THROW(check_admission(make_pareto(3.0), p), AdmissionError);
  EXPECT_NO_THROW(check_admission(make_pareto(1.5), p));
  p.beta = 0.5;
  EXPECT_THROW(check_admission(make_st_petersburg(), p), AdmissionError);
  p.beta = 1.0;
  EXPECT_NO_THROW(check_admission(make_st_petersburg(), p));
  EXPECT_NO_THROW(check_admission(make_inverse_log(), p));
}
