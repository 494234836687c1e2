#ifndef RVLAB_MOMENTS_HPP
#define RVLAB_MOMENTS_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rvlab/quadrature.hpp"
#include "rvlab/tail_model.hpp"

namespace rvlab {

struct MomentValue {
  double value = 0.0;
  double error = 0.0;
};

/// h_beta, V_beta and the tail weight u = x^beta Fbar(x) sampled on a grid.
struct MomentCurve {
  double beta = 0.0;
  std::vector<double> grid;
  std::vector<double> h;
  std::vector<double> v;
  std::vector<double> u;
  std::vector<double> r1;  // u / h
  std::vector<double> r2;  // v / h
  std::vector<double> quad_error;
  /// Part of the grid lies where a tabulated tail is extrapolated.
  bool extrapolated = false;

  std::size_t size() const noexcept { return grid.size(); }
};

namespace detail {

inline double checked_tail(const TailModel& model, double x) {
  const double t = model.tail(x);
  if (!std::isfinite(t)) throw ModelEvaluationError(model.name + ": non-finite tail value", x);
  if (t < 0.0 || t > 1.0) throw ModelEvaluationError(model.name + ": tail value outside [0,1]", x);
  return t;
}

}  // namespace detail

/// beta * int_a^b y^(beta-1) Fbar(y) dy for 0 <= a <= b.
///
/// Below the support floor Fbar = 1 and the segment is exact. Above it the
/// range is cut at the model's breakpoints; staircase tails are summed exactly
/// and smooth pieces are integrated by adaptive Simpson in t = log y.
inline MomentValue compute_h_segment(const TailModel& model, double beta, double a, double b,
                                     double rel_tol) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  MomentValue out;
  if (!(b > a)) return out;

  auto add = [&](double piece, double piece_err) {
    out.value += piece;
    out.error += piece_err + eps * std::abs(out.value);
  };

  const double floor = model.support_floor;
  if (a < floor) {
    const double hi = std::min(b, floor);
    const double piece = std::pow(hi, beta) - (a > 0.0 ? std::pow(a, beta) : 0.0);
    add(piece, 4.0 * eps * std::pow(hi, beta));
  }
  const double lo = std::max(a, floor);
  if (!(b > lo)) return out;

  std::vector<double> cuts{lo};
  if (model.breakpoints) {
    for (double c : model.breakpoints(lo, b))
      if (c > lo && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double c0 = cuts[i];
    const double c1 = cuts[i + 1];
    if (model.piecewise_constant) {
      const double level = detail::checked_tail(model, c0);
      const double piece = level * (std::pow(c1, beta) - std::pow(c0, beta));
      add(piece, 4.0 * eps * std::abs(piece));
      continue;
    }
    // exp(log c) need not round-trip, so samples are pinned inside [c0, c1)
    // and a jump at c1 is never seen from the left piece.
    const double c1_left = std::nextafter(c1, 0.0);
    auto integrand = [&](double t) {
      const double y = std::clamp(std::exp(t), c0, c1_left);
      return beta * std::exp(beta * t) * detail::checked_tail(model, y);
    };
    try {
      const QuadratureResult q = adaptive_simpson(integrand, std::log(c0), std::log(c1), rel_tol,
                                                  std::numeric_limits<double>::min());
      add(q.value, q.error);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(e.what(), out.value + e.best_estimate(), out.error + e.error_estimate());
    }
  }
  return out;
}

/// h_beta(x) = beta * int_0^x y^(beta-1) Fbar(y) dy.
inline MomentValue compute_h(const TailModel& model, double beta, double x, double rel_tol = 1e-10) {
  if (!(x > 0.0)) throw ValidationError("compute_h: x must be > 0");
  if (!(beta > 0.0)) throw ValidationError("compute_h: beta must be > 0");
  return compute_h_segment(model, beta, 0.0, x, rel_tol);
}

/// V_beta(x) = h_beta(x) - x^beta Fbar(x).
inline double compute_v(const TailModel& model, double beta, double x, MomentValue h) {
  const double u = std::pow(x, beta) * detail::checked_tail(model, x);
  const double v = h.value - u;
  if (v < 0.0) {
    const double slack = h.error + 4.0 * std::numeric_limits<double>::epsilon() * std::max(h.value, u);
    if (-v > slack)
      throw InconsistencyError(model.name + ": V_beta(" + std::to_string(x) + ") = " + std::to_string(v) +
                               " is negative beyond the error bound");
    return 0.0;
  }
  return v;
}

/// Grid over [x_min, x_max]: geometric with points_per_decade density, or,
/// for log-periodic models, anchored at exact powers of the period with at
/// least the same density. Model breakpoints in range are always included.
inline std::vector<double> build_grid(const TailModel& model, const AnalysisParams& params) {
  struct Node {
    double x;
    int priority;
  };
  std::vector<Node> nodes;
  const double lo = params.x_min;
  const double hi = params.x_max;
  const double slack = 1e-12;

  if (model.log_period) {
    const double p = *model.log_period;
    const double lp = std::log(p);
    const long per = static_cast<long>(std::ceil(params.points_per_decade * std::log10(p) - 1e-9));
    const long steps = std::max(1L, per);
    const long j0 = static_cast<long>(std::ceil(steps * std::log(lo) / lp - 1e-9));
    const long j1 = static_cast<long>(std::floor(steps * std::log(hi) / lp + 1e-9));
    for (long j = j0; j <= j1; ++j) {
      const double x = (j % steps == 0) ? std::pow(p, static_cast<double>(j / steps))
                                        : std::pow(p, static_cast<double>(j) / static_cast<double>(steps));
      if (x >= lo * (1 - slack) && x <= hi * (1 + slack)) nodes.push_back({x, 1});
    }
  } else {
    const double decades = std::log10(hi / lo);
    const long n = static_cast<long>(std::floor(decades * params.points_per_decade + 1e-9));
    for (long i = 0; i <= n; ++i)
      nodes.push_back({lo * std::pow(10.0, static_cast<double>(i) / params.points_per_decade), 0});
  }
  nodes.push_back({lo, 1});
  nodes.push_back({hi, 1});
  if (model.breakpoints)
    for (double b : model.breakpoints(lo, hi)) nodes.push_back({b, 2});

  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) { return l.x < r.x; });
  std::vector<Node> merged;
  for (const Node& n : nodes) {
    if (!merged.empty() && n.x - merged.back().x <= slack * n.x) {
      if (n.priority > merged.back().priority) merged.back() = n;
      continue;
    }
    merged.push_back(n);
  }
  std::vector<double> out;
  out.reserve(merged.size());
  for (const Node& n : merged)
    if (n.x >= lo && n.x <= hi) out.push_back(n.x);
  return out;
}

/// Samples h, V, u and the two ratios along build_grid. h is accumulated
/// segment by segment, so the cost is linear in the grid size.
inline MomentCurve build_curve(const TailModel& model, const AnalysisParams& params) {
  params.validate();
  MomentCurve c;
  c.beta = params.beta;
  c.grid = build_grid(model, params);
  const std::size_t n = c.grid.size();
  c.h.resize(n);
  c.v.resize(n);
  c.u.resize(n);
  c.r1.resize(n);
  c.r2.resize(n);
  c.quad_error.resize(n);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  MomentValue acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = c.grid[i];
    try {
      // Staircase sums are exact and cheap, so they are recomputed from zero
      // rather than accumulated; this keeps values at the steps exact.
      if (i == 0 || model.piecewise_constant) {
        acc = compute_h(model, params.beta, x, params.rel_tol);
      } else {
        const MomentValue seg = compute_h_segment(model, params.beta, c.grid[i - 1], x, params.rel_tol);
        acc.value += seg.value;
        acc.error += seg.error + 2.0 * eps * acc.value;
      }
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " (grid point x=" + std::to_string(x) + ")",
                             acc.value + e.best_estimate(), acc.error + e.error_estimate());
    }
    c.h[i] = acc.value;
    c.quad_error[i] = acc.error;
    c.u[i] = std::pow(x, params.beta) * detail::checked_tail(model, x);
    c.v[i] = compute_v(model, params.beta, x, acc);
    c.r1[i] = c.u[i] / c.h[i];
    c.r2[i] = 1.0 - c.r1[i];
  }
  if (model.extrapolated_beyond && params.x_max > *model.extrapolated_beyond) c.extrapolated = true;
  return c;
}

/// Rejects (model, beta) pairs whose beta-moment looks finite on the analysis
/// range: h_beta(x_max) must exceed 10 h_beta(x_min).
inline void check_admission(const TailModel& model, const AnalysisParams& params) {
  const double h_lo = compute_h(model, params.beta, params.x_min, params.rel_tol).value;
  const double h_hi = compute_h(model, params.beta, params.x_max, params.rel_tol).value;
  if (!(h_hi > 10.0 * h_lo)) {
    throw AdmissionError(model.name + ": beta-moment appears finite at beta=" + std::to_string(params.beta) +
                         " (h(x_max)=" + std::to_string(h_hi) + " <= 10 h(x_min)=" +
                         std::to_string(10.0 * h_lo) + ")");
  }
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_curve_csv(std::ostream& os, const MomentCurve& c) {
  os << "x,h,v,u,r1,r2,quad_error\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_double(c.grid[i]) << ',' << format_double(c.h[i]) << ',' << format_double(c.v[i]) << ','
       << format_double(c.u[i]) << ',' << format_double(c.r1[i]) << ',' << format_double(c.r2[i]) << ','
       << format_double(c.quad_error[i]) << '\n';
  }
}

}  // namespace rvlab

#endif  // RVLAB_MOMENTS_HPP
