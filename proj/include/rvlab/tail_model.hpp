#ifndef RVLAB_TAIL_MODEL_HPP
#define RVLAB_TAIL_MODEL_HPP

#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rvlab/errors.hpp"

namespace rvlab {

struct PointMass {
  double location;
  double jump;
};

/// Known asymptotics of a catalog model. Only tests read this; the analysis
/// code never consults it.
struct GroundTruth {
  /// Index of h_beta for a given beta, or nullopt when the beta-moment is finite.
  std::function<std::optional<double>(double beta)> rho;
  bool tail_is_rv = true;
  bool pi_member = false;
};

/// A tail function Fbar(x) = P(X > x) of a nonnegative random variable.
///
/// Fbar(x) = 1 for x < support_floor. Models are immutable once built and all
/// callables are pure, so a model can be shared freely between threads.
struct TailModel {
  std::string name;
  std::map<std::string, double> params;
  double support_floor = 1.0;

  std::function<double(double)> tail;

  /// Discontinuity or kink locations in the closed interval [a, b], ascending.
  std::function<std::vector<double>(double a, double b)> breakpoints;

  /// Atoms in the half-open interval (a, b]. Empty callable for models
  /// without point masses.
  std::function<std::vector<PointMass>(double a, double b)> point_masses;

  /// Closed form of h_beta(x) when one is known.
  std::function<double(double beta, double x)> closed_form_h;

  std::optional<GroundTruth> ground_truth;

  /// Fbar is constant between consecutive breakpoints.
  bool piecewise_constant = false;

  /// Period p of the log-periodic tail weight, when the model has one.
  /// Grids for such models are anchored at exact powers of p.
  std::optional<double> log_period;

  /// Beyond this point the tail is extrapolated rather than known.
  std::optional<double> extrapolated_beyond;

  std::vector<std::string> warnings;

  double operator()(double x) const { return tail(x); }

  bool has_point_masses() const { return static_cast<bool>(point_masses); }
  bool has_closed_form_h() const { return static_cast<bool>(closed_form_h); }
};

/// Knobs shared by every analysis step.
struct AnalysisParams {
  double beta = 1.0;
  std::vector<double> lambdas{2.0, std::numbers::e, 3.0, 8.0};
  double x_min = 1.0;
  double x_max = 1e12;
  int points_per_decade = 16;
  double rel_tol = 1e-10;
  double eps_rho = 0.02;

  // Convergence bands for tail-window estimators.
  double window_decades = 3.0;
  double spread_band = 0.02;
  double trend_band = 0.01;
  /// A verdict of "false" needs spread above this multiple of spread_band.
  double falsity_factor = 5.0;
  /// Relative tolerance on |R(x, lambda) - log lambda| / log lambda.
  double pi_tol = 0.05;
  /// u/v above this (and increasing) is always reported as gamma = infinity.
  double gamma_infinity = 1e6;

  void validate() const {
    if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
    if (!(x_min > 0.0) || !(x_max > 0.0)) throw ValidationError("x_min and x_max must be positive");
    if (!(x_min < x_max)) throw ValidationError("x_min must be < x_max");
    if (lambdas.empty()) throw ValidationError("at least one lambda is required");
    for (double l : lambdas)
      if (!(l > 1.0)) throw ValidationError("every lambda must be > 1");
    if (points_per_decade < 8) throw ValidationError("points_per_decade must be >= 8");
    if (!(rel_tol > 0.0) || rel_tol > 1e-4) throw ValidationError("rel_tol must lie in (0, 1e-4]");
    if (!(eps_rho > 0.0) || !(eps_rho < beta / 2)) throw ValidationError("eps_rho must lie in (0, beta/2)");
    if (!(window_decades > 0.0)) throw ValidationError("window_decades must be > 0");
  }
};

}  // namespace rvlab

#endif  // RVLAB_TAIL_MODEL_HPP
