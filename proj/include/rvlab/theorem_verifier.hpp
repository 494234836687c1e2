#ifndef RVLAB_THEOREM_VERIFIER_HPP
#define RVLAB_THEOREM_VERIFIER_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rvlab/asymptotics.hpp"
#include "rvlab/moments.hpp"
#include "rvlab/tail_model.hpp"

namespace rvlab {

enum class Verdict { True, False, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

struct ConditionResult {
  Verdict verdict = Verdict::Undecided;
  /// Index (or limit) as estimated; for the tail this is rho - beta.
  std::optional<double> estimate;
  double spread = 0.0;
  /// The value of rho this condition points to.
  std::optional<double> rho;
};

/// Verdicts for the five equivalent conditions on (h, V, Fbar, u/h, V/h).
struct TheoremReport {
  std::string model;
  std::map<std::string, double> model_params;
  double beta = 0.0;
  Regime regime = Regime::Indeterminate;
  ConditionResult h_rv;  // h_beta in RV_rho
  ConditionResult v_rv;  // V_beta in RV_rho
  ConditionResult f_rv;  // Fbar in RV_(rho - beta)
  ConditionResult lim1;  // u/h -> rho/beta
  ConditionResult lim2;  // V/h -> 1 - rho/beta
  std::optional<PiTestResult> pi;
  GammaResult gamma;
  bool consistent = false;
  std::vector<std::string> violations;
  /// Why the regime could not be decided, when it could not.
  std::vector<std::string> diagnostics;
  AnalysisParams params;
};

namespace detail {

inline ConditionResult rv_condition(const RVEstimate& est, const AnalysisParams& params, double rho_shift) {
  ConditionResult c;
  c.estimate = est.rho_hat;
  c.spread = est.spread;
  c.rho = est.rho_hat + rho_shift;
  if (est.converged && est.aliasing_guarded)
    c.verdict = Verdict::True;
  else if (est.aliasing_guarded && est.spread > params.falsity_factor * params.spread_band)
    c.verdict = Verdict::False;
  return c;
}

inline ConditionResult limit_condition(const LimitEstimate& est, const AnalysisParams& params,
                                       bool complement, double beta) {
  ConditionResult c;
  const double value = complement ? 1.0 - est.limit : est.limit;
  c.estimate = value;
  c.spread = est.spread;
  c.rho = complement ? beta * (1.0 - value) : beta * value;
  if (est.converged)
    c.verdict = Verdict::True;
  else if (est.spread > params.falsity_factor * params.spread_band)
    c.verdict = Verdict::False;
  return c;
}

template <class Fn>
ConditionResult guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const InsufficientDataError&) {
    return {};
  } catch (const ValidationError&) {
    return {};
  }
}

inline bool window_positive(const std::vector<double>& grid, const std::vector<double>& f,
                            const AnalysisParams& params) {
  const double lo = window_start(grid, params);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= lo * (1.0 - kGridMatch) && !(f[i] > 0.0)) return false;
  return true;
}

}  // namespace detail

/// Evaluates every condition for (model, beta), decides the regime and checks
/// the verdicts against the implications that hold in that regime:
///
///   interior  all five conditions hold with a common rho;
///   rho_zero  h, V, and both limits hold with rho = 0; the tail may fail;
///   rho_beta  h, tail, and both limits hold with rho = beta; V in RV_beta
///             holds exactly when the tail is in the de Haan class.
///
/// Throws AdmissionError when the beta-moment looks finite.
inline TheoremReport verify(const TailModel& model, const AnalysisParams& params) {
  params.validate();
  check_admission(model, params);
  const MomentCurve curve = build_curve(model, params);
  const double beta = params.beta;

  TheoremReport r;
  r.model = model.name;
  r.model_params = model.params;
  r.beta = beta;
  r.params = params;

  r.h_rv = detail::guarded([&] {
    return detail::rv_condition(estimate_rv_index(curve.grid, curve.h, params), params, 0.0);
  });
  r.v_rv = detail::guarded([&] {
    if (!detail::window_positive(curve.grid, curve.v, params)) return ConditionResult{};
    return detail::rv_condition(estimate_rv_index(curve.grid, curve.v, params), params, 0.0);
  });
  std::vector<double> tail(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) tail[i] = detail::checked_tail(model, curve.grid[i]);
  r.f_rv = detail::guarded([&] {
    if (!detail::window_positive(curve.grid, tail, params)) return ConditionResult{};
    return detail::rv_condition(estimate_rv_index(curve.grid, tail, params), params, beta);
  });
  std::optional<LimitEstimate> r1;
  try {
    r1 = limit_ratio_r1(curve, params);
  } catch (const InsufficientDataError&) {
  }
  if (r1) {
    r.lim1 = detail::limit_condition(*r1, params, false, beta);
    r.lim2 = detail::limit_condition(*r1, params, true, beta);
  }

  try {
    r.gamma = gamma_classification(curve, params);
  } catch (const InsufficientDataError& e) {
    r.gamma.regime = Regime::Indeterminate;
    r.gamma.diagnostics = e.what();
  }

  const Regime by_ratio = (r.lim1.verdict == Verdict::True)
                              ? regime_from_rho(*r.lim1.rho, beta, params.eps_rho)
                              : Regime::Indeterminate;
  if (r.gamma.regime == Regime::Indeterminate) {
    r.diagnostics.push_back("gamma classification indeterminate" +
                            (r.gamma.diagnostics.empty() ? std::string() : ": " + r.gamma.diagnostics));
  } else if (by_ratio == Regime::Indeterminate) {
    r.diagnostics.push_back("limit of u/h did not converge");
  } else if (by_ratio != r.gamma.regime) {
    r.diagnostics.push_back(std::string("regime discordance: gamma says ") + to_string(r.gamma.regime) +
                            ", u/h says " + to_string(by_ratio));
  }
  if (!r.diagnostics.empty()) {
    r.regime = Regime::Indeterminate;
    r.consistent = false;
    return r;
  }
  r.regime = r.gamma.regime;

  const auto require = [&](const ConditionResult& c, const char* name) {
    if (c.verdict != Verdict::True)
      r.violations.push_back(std::string(to_string(r.regime)) + ": " + name + " is " + to_string(c.verdict) +
                             ", expected true");
  };
  switch (r.regime) {
    case Regime::Interior:
      require(r.h_rv, "h_rv");
      require(r.v_rv, "v_rv");
      require(r.f_rv, "f_rv");
      require(r.lim1, "lim1");
      require(r.lim2, "lim2");
      break;
    case Regime::RhoZero:
      require(r.h_rv, "h_rv");
      require(r.v_rv, "v_rv");
      require(r.lim1, "lim1");
      require(r.lim2, "lim2");
      break;
    case Regime::RhoBeta: {
      require(r.h_rv, "h_rv");
      require(r.f_rv, "f_rv");
      require(r.lim1, "lim1");
      require(r.lim2, "lim2");
      try {
        r.pi = pi_class_test(model, params);
      } catch (const IndeterminateError& e) {
        r.diagnostics.push_back(e.what());
      }
      if (r.pi && r.v_rv.verdict != Verdict::Undecided) {
        const bool v_true = r.v_rv.verdict == Verdict::True;
        if (v_true != r.pi->is_member)
          r.violations.push_back(std::string("rho_beta: v_rv is ") + to_string(r.v_rv.verdict) +
                                 " but Pi membership is " + (r.pi->is_member ? "true" : "false"));
      }
      break;
    }
    case Regime::Indeterminate: break;
  }

  // Every index that is asserted must point to the same rho.
  struct Named {
    const char* name;
    double rho;
  };
  std::vector<Named> rhos;
  const auto collect = [&](const ConditionResult& c, const char* name) {
    if (c.verdict == Verdict::True && c.rho) rhos.push_back({name, *c.rho});
  };
  collect(r.h_rv, "h_rv");
  collect(r.v_rv, "v_rv");
  collect(r.f_rv, "f_rv");
  collect(r.lim1, "lim1");
  rhos.push_back({"gamma", r.gamma.rho_hat});
  for (std::size_t i = 0; i < rhos.size(); ++i)
    for (std::size_t j = i + 1; j < rhos.size(); ++j)
      if (std::abs(rhos[i].rho - rhos[j].rho) > 2.0 * params.eps_rho)
        r.violations.push_back(std::string("rho disagreement: ") + rhos[i].name + "=" +
                               format_double(rhos[i].rho) + " vs " + rhos[j].name + "=" +
                               format_double(rhos[j].rho));

  r.consistent = r.violations.empty();
  return r;
}

struct EquivalenceCheck {
  std::string name;
  double observed;
  double expected;
  double tolerance;
  bool passed;
};

/// Tail limits of h/u, h/v, u/h and v/h expected in the report's regime.
inline std::vector<EquivalenceCheck> check_asymptotic_equivalences(const TheoremReport& report,
                                                                   const MomentCurve& curve) {
  std::vector<EquivalenceCheck> out;
  const AnalysisParams& params = report.params;
  const double beta = report.beta;
  const std::size_t n = curve.size();
  std::vector<double> h_u(n), h_v(n), u_h(n), v_h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h_u[i] = curve.u[i] > 0.0 ? curve.h[i] / curve.u[i] : std::numeric_limits<double>::infinity();
    h_v[i] = curve.v[i] > 0.0 ? curve.h[i] / curve.v[i] : std::numeric_limits<double>::infinity();
    u_h[i] = curve.r1[i];
    v_h[i] = curve.v[i] / curve.h[i];
  }
  const auto check = [&](const std::string& name, const std::vector<double>& series, double expected,
                         double tolerance) {
    const LimitEstimate lim = tail_window_limit(curve.grid, series, params, std::max(1.0, expected));
    const bool ok = std::isfinite(lim.limit) && std::abs(lim.limit - expected) <= tolerance;
    out.push_back({name, lim.limit, expected, tolerance, ok});
  };
  const double rel = 0.05;
  const double zero_tol = params.eps_rho / beta;
  switch (report.regime) {
    case Regime::Interior: {
      const double rho = report.h_rv.rho.value_or(beta * report.lim1.estimate.value_or(0.5));
      check("h/u", h_u, beta / rho, rel * beta / rho);
      check("h/v", h_v, beta / (beta - rho), rel * beta / (beta - rho));
      break;
    }
    case Regime::RhoZero:
      check("h/v", h_v, 1.0, rel);
      check("u/h", u_h, 0.0, zero_tol);
      break;
    case Regime::RhoBeta:
      check("h/u", h_u, 1.0, rel);
      check("v/h", v_h, 0.0, zero_tol);
      break;
    case Regime::Indeterminate: break;
  }
  return out;
}

}  // namespace rvlab

#endif  // RVLAB_THEOREM_VERIFIER_HPP
