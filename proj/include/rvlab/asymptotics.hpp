#ifndef RVLAB_ASYMPTOTICS_HPP
#define RVLAB_ASYMPTOTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvlab/moments.hpp"
#include "rvlab/tail_model.hpp"

namespace rvlab {

enum class Regime { Interior, RhoZero, RhoBeta, Indeterminate };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Interior: return "interior";
    case Regime::RhoZero: return "rho_zero";
    case Regime::RhoBeta: return "rho_beta";
    case Regime::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

/// Boundary classification of an index estimate in [0, beta].
inline Regime regime_from_rho(double rho, double beta, double eps_rho) {
  if (rho < eps_rho) return Regime::RhoZero;
  if (rho > beta - eps_rho) return Regime::RhoBeta;
  return Regime::Interior;
}

struct ScaleEstimate {
  double x;
  double lambda;
  double local;  // log(f(lambda x) / f(x)) / log lambda
  bool interpolated;
};

struct RVEstimate {
  double rho_hat = 0.0;
  std::vector<ScaleEstimate> per_scale;
  bool converged = false;
  double spread = 0.0;  // half-range of the local estimates
  double trend = 0.0;   // mean(second half) - mean(first half), by x
  std::pair<double, double> window{0.0, 0.0};
  /// Some lambda * x fell between grid points and was interpolated.
  bool interpolated = false;
  /// At least two lambdas with incommensurable logarithms took part.
  bool aliasing_guarded = false;
};

/// Tail-window average of a sampled ratio.
struct LimitEstimate {
  double limit = 0.0;
  bool converged = false;
  double spread = 0.0;
  double trend = 0.0;
  std::pair<double, double> window{0.0, 0.0};
};

namespace detail {

constexpr double kGridMatch = 1e-9;

struct Lookup {
  double value;
  bool interpolated;
};

/// f at x: exact when x is a grid point, otherwise linear in (log x, log f).
inline Lookup lookup(std::span<const double> grid, std::span<const double> f, double x) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), x * (1.0 - kGridMatch));
  const auto i = static_cast<std::size_t>(it - grid.begin());
  if (i < grid.size() && std::abs(grid[i] - x) <= kGridMatch * x) return {f[i], false};
  if (i == 0 || i >= grid.size()) throw InsufficientDataError("lookup outside the sampled grid");
  const double w = (std::log(x) - std::log(grid[i - 1])) / (std::log(grid[i]) - std::log(grid[i - 1]));
  return {std::exp(std::log(f[i - 1]) + w * (std::log(f[i]) - std::log(f[i - 1]))), true};
}

/// log a / log b is not a ratio of small integers.
inline bool incommensurable(double a, double b) {
  const double r = std::log(a) / std::log(b);
  for (int q = 1; q <= 12; ++q) {
    const double s = r * q;
    if (std::abs(s - std::round(s)) < 1e-9 * q) return false;
  }
  return true;
}

inline bool any_incommensurable_pair(const std::vector<double>& lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    for (std::size_t j = i + 1; j < lambdas.size(); ++j)
      if (incommensurable(lambdas[i], lambdas[j])) return true;
  return false;
}

inline double window_start(std::span<const double> grid, const AnalysisParams& params) {
  return grid.back() * std::pow(10.0, -params.window_decades);
}

struct Summary {
  double mean, spread, trend;
};

/// Mean, half-range and first/second-half drift of values ordered by xs.
inline Summary summarize(const std::vector<double>& xs, const std::vector<double>& values) {
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / static_cast<double>(values.size());
  std::vector<double> sorted_x = xs;
  std::sort(sorted_x.begin(), sorted_x.end());
  const double median = sorted_x[sorted_x.size() / 2];
  double first = 0.0, second = 0.0;
  std::size_t nf = 0, ns = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (xs[i] < median) {
      first += values[i];
      ++nf;
    } else {
      second += values[i];
      ++ns;
    }
  }
  const double trend = (nf && ns) ? second / ns - first / nf : 0.0;
  return {mean, 0.5 * (hi - lo), trend};
}

}  // namespace detail

/// Regular-variation index of a positive function sampled on a grid, from
/// local estimates log(f(lambda x)/f(x))/log lambda over the top
/// window_decades of the grid and every configured lambda.
///
/// converged only looks at spread and trend. A single lambda that is a power
/// of a log-period sees a log-periodic function as exactly regularly varying,
/// so callers that need a trustworthy verdict also check aliasing_guarded.
inline RVEstimate estimate_rv_index(std::span<const double> grid, std::span<const double> f,
                                    const AnalysisParams& params) {
  if (grid.size() != f.size() || grid.empty()) throw InsufficientDataError("empty or mismatched samples");
  RVEstimate est;
  const double top = grid.back();
  const double lo = detail::window_start(grid, params);
  est.window = {lo, top};

  std::vector<double> xs, locals;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    if (x < lo * (1.0 - detail::kGridMatch)) continue;
    for (double lambda : params.lambdas) {
      const double lx = lambda * x;
      if (lx > top * (1.0 + detail::kGridMatch)) continue;
      if (!(f[i] > 0.0)) throw ValidationError("estimate_rv_index: f must be positive on the window");
      const auto shifted = detail::lookup(grid, f, lx);
      if (!(shifted.value > 0.0)) throw ValidationError("estimate_rv_index: f must be positive on the window");
      const double local = std::log(shifted.value / f[i]) / std::log(lambda);
      est.per_scale.push_back({x, lambda, local, shifted.interpolated});
      est.interpolated = est.interpolated || shifted.interpolated;
      xs.push_back(x);
      locals.push_back(local);
    }
  }
  if (est.per_scale.size() < 8)
    throw InsufficientDataError("estimate_rv_index: fewer than 8 usable (x, lambda) pairs in the window");

  const auto s = detail::summarize(xs, locals);
  est.rho_hat = s.mean;
  est.spread = s.spread;
  est.trend = s.trend;
  est.converged = s.spread <= params.spread_band && std::abs(s.trend) <= params.trend_band;
  est.aliasing_guarded = detail::any_incommensurable_pair(params.lambdas);
  return est;
}

inline LimitEstimate tail_window_limit(std::span<const double> grid, std::span<const double> values,
                                       const AnalysisParams& params, double band_scale = 1.0) {
  LimitEstimate out;
  const double lo = detail::window_start(grid, params);
  out.window = {lo, grid.back()};
  std::vector<double> xs, vs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < lo * (1.0 - detail::kGridMatch)) continue;
    xs.push_back(grid[i]);
    vs.push_back(values[i]);
  }
  if (vs.size() < 8) throw InsufficientDataError("tail window holds fewer than 8 grid points");
  const auto s = detail::summarize(xs, vs);
  out.limit = s.mean;
  out.spread = s.spread;
  out.trend = s.trend;
  out.converged =
      s.spread <= params.spread_band * band_scale && std::abs(s.trend) <= params.trend_band * band_scale;
  return out;
}

/// Limit of u/h; the limit of v/h is 1 minus this.
inline LimitEstimate limit_ratio_r1(const MomentCurve& curve, const AnalysisParams& params) {
  return tail_window_limit(curve.grid, curve.r1, params);
}

// ---------------------------------------------------------------------------
// de Haan class

struct LambdaResidual {
  double lambda;
  double max_residual;  // max |R - log lambda| / log lambda
  double mean_ratio;    // mean R(x, lambda)
  std::size_t evaluated;
};

struct PiTestResult {
  bool is_member = false;
  std::optional<double> c_hat;
  std::vector<std::pair<double, double>> ell_samples;  // (x, l(x))
  std::vector<LambdaResidual> per_lambda_residuals;
  double max_residual = 0.0;
  std::vector<double> skipped;  // x where Fbar(ex) == Fbar(x)
};

/// Self-normalised increment ratio (F(lambda x) - F(x)) / (F(e x) - F(x)).
/// Tends to log lambda exactly when F is in the de Haan class. Returns
/// nullopt when the denominator vanishes.
template <class F>
std::optional<double> pi_ratio(const F& tail, double x, double lambda) {
  const double base = tail(x);
  const double den = tail(std::numbers::e * x) - base;
  if (den == 0.0) return std::nullopt;
  return (tail(lambda * x) - base) / den;
}

/// Tests Fbar for de Haan class membership over the tail window of the grid.
///
/// On membership the index is reported against the canonical auxiliary
/// function l(x) = V_1(x)/x = (1/x) int_0^x Fbar - Fbar(x), and l is then
/// sampled as (Fbar(x) - Fbar(ex)) / c_hat.
inline PiTestResult pi_class_test(const TailModel& model, const AnalysisParams& params) {
  params.validate();
  const std::vector<double> grid = build_grid(model, params);
  const double top = grid.back();
  const double lo = detail::window_start(grid, params);

  std::vector<double> xs;
  for (double x : grid)
    if (x >= lo * (1.0 - detail::kGridMatch) && std::numbers::e * x <= top * (1.0 + detail::kGridMatch))
      xs.push_back(x);

  PiTestResult out;
  std::vector<double> c_samples;
  std::size_t evaluated = 0;
  for (double lambda : params.lambdas) out.per_lambda_residuals.push_back({lambda, 0.0, 0.0, 0});

  for (double x : xs) {
    const double base = detail::checked_tail(model, x);
    const double den = detail::checked_tail(model, std::numbers::e * x) - base;
    if (den == 0.0) {
      out.skipped.push_back(x);
      continue;
    }
    for (auto& lr : out.per_lambda_residuals) {
      if (lr.lambda * x > top * (1.0 + detail::kGridMatch)) continue;
      const double r = (detail::checked_tail(model, lr.lambda * x) - base) / den;
      const double res = std::abs(r - std::log(lr.lambda)) / std::log(lr.lambda);
      lr.max_residual = std::max(lr.max_residual, res);
      lr.mean_ratio += r;
      ++lr.evaluated;
      ++evaluated;
    }
  }
  if (evaluated == 0) throw IndeterminateError(model.name + ": Pi-test skipped every window point");
  for (auto& lr : out.per_lambda_residuals) {
    if (lr.evaluated) lr.mean_ratio /= static_cast<double>(lr.evaluated);
    out.max_residual = std::max(out.max_residual, lr.max_residual);
  }
  out.is_member = out.max_residual <= params.pi_tol;
  if (!out.is_member) return out;

  // c from the canonical auxiliary function, accumulated along the window.
  MomentValue h1;
  double prev = 0.0;
  for (double x : xs) {
    const MomentValue seg = compute_h_segment(model, 1.0, prev, x, params.rel_tol);
    h1.value += seg.value;
    prev = x;
    const double base = detail::checked_tail(model, x);
    const double ell = (h1.value - x * base) / x;
    if (!(ell > 0.0)) continue;
    for (double lambda : params.lambdas) {
      if (lambda * x > top * (1.0 + detail::kGridMatch)) continue;
      const double diff = detail::checked_tail(model, lambda * x) - base;
      c_samples.push_back(-diff / (ell * std::log(lambda)));
    }
  }
  if (!c_samples.empty()) {
    double s = 0.0;
    for (double c : c_samples) s += c;
    out.c_hat = s / static_cast<double>(c_samples.size());
    for (double x : xs) {
      const double diff = detail::checked_tail(model, x) - detail::checked_tail(model, std::numbers::e * x);
      out.ell_samples.emplace_back(x, diff / *out.c_hat);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// gamma / p classification

struct GammaResult {
  /// Limit of u/v; +infinity when u/v diverges.
  double gamma_hat = 0.0;
  double p_hat = 0.0;  // beta / (1 + gamma)
  Regime regime = Regime::Indeterminate;
  bool converged = false;
  double spread = 0.0;
  double trend = 0.0;
  /// p_hat agrees with beta - beta * lim(u/h) within 2 eps_rho.
  bool cross_check = false;
  std::string diagnostics;

  /// beta - p_hat, the index implied by gamma.
  double rho_hat = 0.0;

  bool infinite() const noexcept { return std::isinf(gamma_hat); }
};

/// Classifies the regime from the tail limit of u/v.
///
/// rho = beta gamma / (1 + gamma), so the rho thresholds eps_rho and
/// beta - eps_rho become gamma < eps/(beta-eps) and gamma > (beta-eps)/eps.
/// u/v above the upper threshold everywhere in the window and still rising is
/// reported as gamma = infinity (p = 0).
inline GammaResult gamma_classification(const MomentCurve& curve, const AnalysisParams& params) {
  const double beta = curve.beta;
  const double eps = params.eps_rho;
  const double low = eps / (beta - eps);
  const double high = std::min((beta - eps) / eps, params.gamma_infinity);

  const double lo = detail::window_start(curve.grid, params);
  std::vector<double> xs, g;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.grid[i] < lo * (1.0 - detail::kGridMatch)) continue;
    if (!(curve.v[i] > 0.0)) throw InsufficientDataError("gamma_classification: V vanishes in the window");
    xs.push_back(curve.grid[i]);
    g.push_back(curve.u[i] / curve.v[i]);
  }
  if (g.size() < 8) throw InsufficientDataError("tail window holds fewer than 8 grid points");

  GammaResult out;
  const auto s = detail::summarize(xs, g);
  out.spread = s.spread;
  out.trend = s.trend;
  const double g_min = *std::min_element(g.begin(), g.end());

  if (g_min > high && s.trend > 0.0 && g.back() > g.front()) {
    out.gamma_hat = std::numeric_limits<double>::infinity();
    out.p_hat = 0.0;
    out.converged = true;
    out.regime = Regime::RhoBeta;
  } else {
    const double scale = std::max(1.0, std::abs(s.mean));
    out.gamma_hat = s.mean;
    out.p_hat = beta / (1.0 + s.mean);
    out.converged = s.spread <= params.spread_band * scale && std::abs(s.trend) <= params.trend_band * scale;
    if (!out.converged) {
      out.regime = Regime::Indeterminate;
      out.diagnostics = "u/v does not settle: spread " + format_double(s.spread) + ", trend " +
                        format_double(s.trend);
    } else if (s.mean < low) {
      out.regime = Regime::RhoZero;
    } else if (s.mean > high) {
      out.regime = Regime::RhoBeta;
    } else {
      out.regime = Regime::Interior;
    }
  }

  out.rho_hat = beta - out.p_hat;
  const auto r1 = limit_ratio_r1(curve, params);
  out.cross_check = std::abs(out.p_hat - (beta - beta * r1.limit)) <= 2.0 * eps;
  return out;
}

}  // namespace rvlab

#endif  // RVLAB_ASYMPTOTICS_HPP
