#ifndef RVLAB_QUADRATURE_HPP
#define RVLAB_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "rvlab/errors.hpp"

namespace rvlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

/// Globally budgeted adaptive Simpson rule on [a, b].
///
/// Each panel is accepted once |S(left) + S(right) - S(whole)| <= 15 * tol_i,
/// where tol_i is the panel's share (by length) of the absolute target
/// max(rel_tol * |I|, abs_floor). Accepted panels contribute the Richardson
/// corrected value; the error estimate is the sum of |diff| / 15 plus a
/// summation rounding bound. Throws ConvergenceError when more than
/// max_intervals panels would be live at once.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double rel_tol,
                                  double abs_floor = 0.0,
                                  std::size_t max_intervals = std::size_t{1} << 15) {
  QuadratureResult out;
  if (!(b > a)) return out;

  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
  };
  const auto simpson = [](double lo, double hi, double fa, double fm, double fb) {
    return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  };

  // Seed panels; their composite sum also fixes the absolute target.
  constexpr int kSeed = 4;
  std::vector<Panel> stack;
  stack.reserve(64);
  const double width = (b - a) / kSeed;
  double coarse = 0.0;
  double f_left = f(a);
  for (int i = 0; i < kSeed; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == kSeed) ? b : lo + width;
    const double fm = f(0.5 * (lo + hi));
    const double fr = f(hi);
    const double s = simpson(lo, hi, f_left, fm, fr);
    coarse += std::abs(s);
    stack.push_back({lo, hi, f_left, fm, fr, s, 0.0});
    f_left = fr;
  }
  const double target = std::max(rel_tol * coarse, abs_floor);
  for (auto& p : stack) p.tol = target * (p.b - p.a) / (b - a);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double abs_sum = 0.0;
  std::size_t accepted = 0;

  // On failure, refine every pending panel once so the reported estimate
  // covers all of [a, b] and the error reflects the unresolved panels.
  const auto bail = [&](const char* why, double current, double current_err) {
    double best = out.value + current;
    double err = out.error + current_err;
    for (const auto& q : stack) {
      const double m = 0.5 * (q.a + q.b);
      const double l = simpson(q.a, m, q.fa, f(0.5 * (q.a + m)), q.fm);
      const double r = simpson(m, q.b, q.fm, f(0.5 * (m + q.b)), q.fb);
      best += l + r;
      err += std::abs(l + r - q.whole);
    }
    throw ConvergenceError(why, best, err);
  };
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, m, p.fa, flm, p.fm);
    const double right = simpson(m, p.b, p.fm, frm, p.fb);
    const double diff = left + right - p.whole;
    const bool unsplittable = (p.b - p.a) <= 8.0 * eps * std::max(std::abs(p.a), std::abs(p.b));
    if (std::abs(diff) <= 15.0 * p.tol || unsplittable) {
      if (unsplittable && std::abs(diff) > 15.0 * p.tol) {
        bail("adaptive Simpson: panel width underflow", left + right, std::abs(diff));
      }
      const double piece = left + right + diff / 15.0;
      out.value += piece;
      out.error += std::abs(diff) / 15.0;
      abs_sum += std::abs(piece);
      ++accepted;
      continue;
    }
    if (stack.size() + accepted + 2 > max_intervals) {
      bail("adaptive Simpson: subdivision budget exhausted", left + right, std::abs(diff));
    }
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol});
  }
  out.intervals = accepted;
  out.error += static_cast<double>(accepted + 1) * eps * abs_sum;
  return out;
}

}  // namespace rvlab

#endif  // RVLAB_QUADRATURE_HPP
