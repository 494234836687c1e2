#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "rvlab/catalog.hpp"
#include "rvlab/moments.hpp"

using namespace rvlab;

namespace {

AnalysisParams params_for(double beta, double x_max, int ppd = 16) {
  AnalysisParams p;
  p.beta = beta;
  p.x_max = x_max;
  p.points_per_decade = ppd;
  return p;
}

double value_at(const MomentCurve& c, const std::vector<double>& series, double x) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.grid[i] == x) return series[i];
  ADD_FAILURE() << "grid misses " << x;
  return NAN;
}

}  // namespace

TEST(ComputeH, ParetoClosedForm) {
  const auto m = make_pareto(1.5, 1.0);
  const auto h = compute_h(m, 2.0, 100.0);
  EXPECT_NEAR(h.value, 37.0, 37.0 * 1e-10);
  EXPECT_LE(std::abs(h.value - 37.0), h.error + 1e-13);
  EXPECT_EQ(compute_h(m, 2.0, 1.0).value, 1.0);
  EXPECT_EQ(compute_h(m, 2.0, 0.5).value, 0.25);
}

TEST(ComputeH, StPetersburgPiecewiseExact) {
  const auto m = make_st_petersburg();
  EXPECT_EQ(compute_h(m, 1.0, 8.0).value, 4.0);
  for (int n = 1; n <= 60; ++n) EXPECT_EQ(compute_h(m, 1.0, std::ldexp(1.0, n)).value, n + 1.0) << n;
}

TEST(ComputeH, RejectsBadArguments) {
  const auto m = make_pareto(1.5);
  EXPECT_THROW(compute_h(m, 2.0, 0.0), ValidationError);
  EXPECT_THROW(compute_h(m, -1.0, 2.0), ValidationError);
}

TEST(ComputeH, QuadratureAgreesWithClosedForms) {
  const std::vector<TailModel> models{make_pareto(1.5, 1.0), make_pareto(0.7, 2.5), make_pareto(2.0, 1.0),
                                      make_inverse_log(), make_st_petersburg(), make_geometric_tail(0.5, 10.0)};
  for (const auto& m : models) {
    ASSERT_TRUE(m.has_closed_form_h()) << m.name;
    for (double beta : {0.5, 1.0, 2.0}) {
      for (double x : {0.7, 3.0, 17.0, 1e3, 1e6 + 3.0, 1e12}) {
        const auto q = compute_h(m, beta, x);
        const double exact = m.closed_form_h(beta, x);
        // The error is an estimate; a factor of two covers its usual slack.
        EXPECT_LE(std::abs(q.value - exact), 2.0 * q.error + 1e-13 * exact)
            << m.name << " beta=" << beta << " x=" << x;
        EXPECT_LE(std::abs(q.value - exact), 1e-9 * exact) << m.name << " beta=" << beta << " x=" << x;
      }
    }
  }
}

TEST(ComputeH, StaircaseOracle) {
  const auto m = make_geometric_tail(1.5, 3.0);
  for (double beta : {0.5, 1.5, 2.0})
    for (double x : {2.0, 3.0, 10.0, 81.0, 1234.5, 1e9})
      EXPECT_NEAR(compute_h(m, beta, x).value, oracle::staircase_h(m, beta, x),
                  1e-13 * oracle::staircase_h(m, beta, x));
}

TEST(ComputeH, NonFiniteTailIsReported) {
  TailModel m = make_pareto(1.5);
  m.tail = [](double x) { return x < 5.0 ? 0.5 : std::numeric_limits<double>::quiet_NaN(); };
  EXPECT_THROW(compute_h(m, 1.0, 10.0), ModelEvaluationError);
}

TEST(ComputeH, UndeclaredJumpFailsToConverge) {
  TailModel m = make_pareto(1.5);
  m.tail = [](double x) { return x < 1.0 ? 1.0 : (x < 5.3 ? 0.5 : 0.1); };
  try {
    compute_h(m, 1.0, 10.0);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_NEAR(e.best_estimate(), 1.0 + 0.5 * 4.3 + 0.1 * 4.7, 1e-3);
  }
}

TEST(ComputeV, ParetoIdentity) {
  const auto m = make_pareto(1.5, 1.0);
  const auto h = compute_h(m, 2.0, 100.0);
  EXPECT_NEAR(compute_v(m, 2.0, 100.0, h), 27.0, 27.0 * 1e-10);
}

TEST(ComputeV, StPetersburgMatchesAtomSum) {
  const auto m = make_st_petersburg();
  const double v = compute_v(m, 1.0, 8.0, compute_h(m, 1.0, 8.0));
  EXPECT_EQ(v, 3.0);
  EXPECT_EQ(oracle::stieltjes_atoms(m, 1.0, 8.0).value, 2 * 0.5 + 4 * 0.25 + 8 * 0.125);
}

TEST(ComputeV, ZeroBelowSupport) {
  for (const auto& m : {make_pareto(1.5, 3.0), make_st_petersburg(), make_inverse_log()}) {
    const double x = 0.9 * m.support_floor;
    EXPECT_EQ(compute_v(m, 1.5, x, compute_h(m, 1.5, x)), 0.0) << m.name;
  }
}

TEST(ComputeV, NegativeBeyondErrorIsInconsistent) {
  TailModel m = make_pareto(1.5);
  m.tail = [](double x) { return x < 10.0 ? 0.1 : 1.0; };  // not a tail function
  m.support_floor = 0.5;
  m.breakpoints = [](double a, double b) { return detail::single_breakpoint(10.0, a, b); };
  const auto h = compute_h(m, 1.0, 10.0);
  EXPECT_THROW(compute_v(m, 1.0, 10.0, h), InconsistencyError);
}

TEST(BuildGrid, DecadeGridWithBreakpoints) {
  const auto m = make_inverse_log();
  const auto grid = build_grid(m, params_for(1.0, 1e4));
  EXPECT_EQ(grid.front(), 1.0);
  EXPECT_EQ(grid.back(), 1e4);
  EXPECT_NE(std::find(grid.begin(), grid.end(), std::numbers::e), grid.end());
  EXPECT_EQ(grid.size(), 4u * 16u + 2u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

TEST(BuildGrid, LogPeriodicGridHitsExactPowers) {
  const auto m = make_st_petersburg();
  const auto grid = build_grid(m, params_for(1.0, 1e12, 64));
  for (int n = 1; n <= 39; ++n)
    EXPECT_NE(std::find(grid.begin(), grid.end(), std::ldexp(1.0, n)), grid.end()) << n;
  // 64 per decade -> at least 16 per octave.
  int per_octave = 0;
  for (double x : grid) per_octave += (x >= 1024.0 && x < 2048.0);
  EXPECT_GE(per_octave, 16);
}

TEST(BuildCurve, ParetoSmallGrid) {
  const auto m = make_pareto(1.5, 1.0);
  const auto c = build_curve(m, params_for(2.0, 100.0, 8));
  EXPECT_EQ(value_at(c, c.h, 1.0), 1.0);
  EXPECT_NEAR(value_at(c, c.h, 10.0), oracle::pareto_15_h2(10.0), 1e-9);
  EXPECT_NEAR(value_at(c, c.h, 100.0), 37.0, 1e-9);
  EXPECT_NEAR(value_at(c, c.h, 10.0), 9.6491106406735, 1e-9);
}

TEST(BuildCurve, DyadicPointsOfStPetersburg) {
  const auto m = make_st_petersburg();
  const auto c = build_curve(m, params_for(1.0, 1e12, 20));
  for (int n = 1; n <= 39; ++n) EXPECT_EQ(value_at(c, c.h, std::ldexp(1.0, n)), n + 1.0) << n;
}

TEST(BuildCurve, RatiosSumToOne) {
  for (const auto& m : {make_pareto(1.5), make_st_petersburg(), make_inverse_log(), make_log_pareto(0.5, 1.0)}) {
    const auto c = build_curve(m, params_for(1.0, 1e15));
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(c.r1[i] + c.r2[i], 1.0) << m.name << " " << c.grid[i];
      EXPECT_GE(c.r1[i], 0.0);
      EXPECT_LE(c.r1[i], 1.0 + c.quad_error[i] / c.h[i]);
      EXPECT_NEAR(c.r2[i], c.v[i] / c.h[i], 1e-12);
    }
  }
}

TEST(BuildCurve, MonotoneWithinErrorBounds) {
  for (const auto& m : {make_pareto(0.7, 2.5), make_geometric_tail(1.0, 3.0), make_inverse_log(),
                        make_log_pareto(1.0, -2.0)}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const auto c = build_curve(m, params_for(beta, 1e20));
      for (std::size_t i = 1; i < c.size(); ++i) {
        const double slack = c.quad_error[i] + c.quad_error[i - 1];
        EXPECT_GE(c.h[i], c.h[i - 1] - slack) << m.name << " beta=" << beta;
        EXPECT_GE(c.v[i], c.v[i - 1] - slack) << m.name << " beta=" << beta;
      }
    }
  }
}

TEST(BuildCurve, IncrementalMatchesFresh) {
  for (const auto& m : {make_pareto(1.5), make_pareto(2.0), make_inverse_log(), make_log_pareto(0.5, 1.0),
                        make_geometric_tail(0.8, 2.0)}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      const auto p = params_for(beta, 1e14);
      const auto c = build_curve(m, p);
      const auto fresh = compute_h(m, beta, p.x_max, p.rel_tol);
      EXPECT_LE(std::abs(c.h.back() - fresh.value), c.quad_error.back() + fresh.error)
          << m.name << " beta=" << beta;
    }
  }
}

TEST(BuildCurve, IdentityAgainstLayerCake) {
  for (const auto& m : {make_pareto(1.5), make_inverse_log(), make_log_pareto(0.5, 1.0)}) {
    const auto c = build_curve(m, params_for(1.0, 1e10));
    for (std::size_t i = 0; i < c.size(); i += 7) {
      const auto vs = oracle::stieltjes_layer_cake(m, 1.0, c.grid[i]);
      EXPECT_LE(std::abs(c.h[i] - vs.value - c.u[i]), 2.0 * c.quad_error[i] + vs.error)
          << m.name << " at " << c.grid[i];
    }
  }
}

TEST(CurveCsv, HeaderAndRoundTripPrecision) {
  const auto c = build_curve(make_st_petersburg(), params_for(1.0, 1e3));
  std::ostringstream os;
  write_curve_csv(os, c);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,h,v,u,r1,r2,quad_error");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(std::stod(cell));
    ASSERT_EQ(fields.size(), 7u);
    EXPECT_EQ(fields[0], c.grid[rows]);
    EXPECT_EQ(fields[1], c.h[rows]);
    EXPECT_EQ(fields[4], c.r1[rows]);
    ++rows;
  }
  EXPECT_EQ(rows, c.size());
  EXPECT_NE(os.str().find("\n8,4,3,1,"), std::string::npos);
}
