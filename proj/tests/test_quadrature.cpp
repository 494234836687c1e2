#include <gtest/gtest.h>

#include <cmath>

#include "rvlab/quadrature.hpp"

using rvlab::adaptive_simpson;

TEST(AdaptiveSimpson, CubicIsExact) {
  const auto r = adaptive_simpson([](double t) { return 3 * t * t * t - t + 2; }, -1.0, 2.0, 1e-12);
  EXPECT_NEAR(r.value, 3.0 * (16.0 - 1.0) / 4.0 - (4.0 - 1.0) / 2.0 + 6.0, 1e-12);
}

TEST(AdaptiveSimpson, ExponentialMeetsRelativeTolerance) {
  for (double k : {0.5, 1.0, 2.0, 5.0}) {
    const auto r = adaptive_simpson([k](double t) { return std::exp(k * t); }, 0.0, 20.0, 1e-10);
    const double exact = std::expm1(20.0 * k) / k;
    EXPECT_LE(std::abs(r.value - exact), 1e-10 * exact) << k;
    EXPECT_LE(std::abs(r.value - exact), r.error + 1e-14 * exact) << k;
    EXPECT_LE(r.error, 1e-10 * exact * 1.01) << k;
  }
}

TEST(AdaptiveSimpson, EmptyIntervalIsZero) {
  const auto r = adaptive_simpson([](double) { return 1.0; }, 3.0, 3.0, 1e-10);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.error, 0.0);
}

TEST(AdaptiveSimpson, BudgetExhaustionCarriesBestEstimate) {
  auto spiky = [](double t) { return 1.0 / std::sqrt(std::abs(t - 0.3) + 1e-12); };
  try {
    adaptive_simpson(spiky, 0.0, 1.0, 1e-12, 0.0, 16);
    FAIL() << "expected ConvergenceError";
  } catch (const rvlab::ConvergenceError& e) {
    const double exact = 2.0 * (std::sqrt(0.3) + std::sqrt(0.7));
    EXPECT_NEAR(e.best_estimate(), exact, 0.2);
    EXPECT_LE(std::abs(e.best_estimate() - exact), e.error_estimate());
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(AdaptiveSimpson, JumpIsResolvedOnlyWhenSplit) {
  auto step = [](double t) { return t < 0.5 ? 1.0 : 0.0; };
  EXPECT_THROW(adaptive_simpson(step, 0.0, 1.0 / 3.0 + 0.5, 1e-10), rvlab::ConvergenceError);
  const auto left = adaptive_simpson(step, 0.0, 0.5 - 1e-15, 1e-12);
  EXPECT_NEAR(left.value, 0.5, 1e-12);
}
