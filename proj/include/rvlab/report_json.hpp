#ifndef RVLAB_REPORT_JSON_HPP
#define RVLAB_REPORT_JSON_HPP

#include <cmath>
#include <optional>
#include <string>

#include "json.hpp"

#include "rvlab/asymptotics.hpp"
#include "rvlab/moments.hpp"
#include "rvlab/theorem_verifier.hpp"

namespace rvlab {

using Json = nlohmann::ordered_json;

namespace detail {

/// JSON has no infinities; they travel as the string "inf".
inline Json number(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  if (std::isnan(v)) return Json(nullptr);
  return Json(v);
}

inline Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const AnalysisParams& p, const std::map<std::string, double>& model_params) {
  Json j;
  Json mp = Json::object();
  for (const auto& [k, v] : model_params) mp[k] = detail::number(v);
  j["model_params"] = mp;
  j["x_min"] = p.x_min;
  j["x_max"] = p.x_max;
  j["points_per_decade"] = p.points_per_decade;
  j["lambdas"] = p.lambdas;
  j["rel_tol"] = p.rel_tol;
  j["eps_rho"] = p.eps_rho;
  j["window_decades"] = p.window_decades;
  j["spread_band"] = p.spread_band;
  j["trend_band"] = p.trend_band;
  j["pi_tol"] = p.pi_tol;
  return j;
}

inline Json to_json(const ConditionResult& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["estimate"] = detail::number(c.estimate);
  j["spread"] = detail::number(c.spread);
  return j;
}

inline Json to_json(const GammaResult& g) {
  Json j;
  j["gamma_hat"] = detail::number(g.gamma_hat);
  j["p_hat"] = detail::number(g.p_hat);
  j["rho_hat"] = detail::number(g.rho_hat);
  j["regime"] = to_string(g.regime);
  j["converged"] = g.converged;
  j["spread"] = detail::number(g.spread);
  j["cross_check"] = g.cross_check;
  return j;
}

inline Json to_json(const PiTestResult& p) {
  Json j;
  j["is_member"] = p.is_member;
  j["c_hat"] = detail::number(p.c_hat);
  j["max_residual"] = detail::number(p.max_residual);
  Json per = Json::array();
  for (const auto& lr : p.per_lambda_residuals) {
    Json e;
    e["lambda"] = lr.lambda;
    e["max_residual"] = detail::number(lr.max_residual);
    e["mean_ratio"] = detail::number(lr.mean_ratio);
    per.push_back(e);
  }
  j["per_lambda"] = per;
  j["skipped"] = p.skipped.size();
  return j;
}

/// Top-level keys: model, beta, regime, conditions, gamma, pi, consistent,
/// violations, params.
inline Json to_json(const TheoremReport& r) {
  Json j;
  j["model"] = r.model;
  j["beta"] = r.beta;
  j["regime"] = to_string(r.regime);
  Json conds;
  conds["h_rv"] = to_json(r.h_rv);
  conds["v_rv"] = to_json(r.v_rv);
  conds["f_rv"] = to_json(r.f_rv);
  conds["lim1"] = to_json(r.lim1);
  conds["lim2"] = to_json(r.lim2);
  j["conditions"] = conds;
  Json gamma = to_json(r.gamma);
  if (!r.diagnostics.empty()) gamma["diagnostics"] = r.diagnostics;
  j["gamma"] = gamma;
  j["pi"] = r.pi ? to_json(*r.pi) : Json(nullptr);
  j["consistent"] = r.consistent;
  j["violations"] = r.violations;
  j["params"] = to_json(r.params, r.model_params);
  return j;
}

inline Json to_json(const RVEstimate& e) {
  Json j;
  j["rho_hat"] = detail::number(e.rho_hat);
  j["converged"] = e.converged;
  j["aliasing_guarded"] = e.aliasing_guarded;
  j["spread"] = detail::number(e.spread);
  j["trend"] = detail::number(e.trend);
  j["window"] = {e.window.first, e.window.second};
  j["interpolated"] = e.interpolated;
  Json per = Json::array();
  for (const auto& s : e.per_scale) per.push_back({s.x, s.lambda, detail::number(s.local), s.interpolated});
  j["per_scale"] = per;
  return j;
}

inline Json to_json(const MomentCurve& c) {
  Json j;
  j["beta"] = c.beta;
  j["x"] = c.grid;
  j["h"] = c.h;
  j["v"] = c.v;
  j["u"] = c.u;
  j["r1"] = c.r1;
  j["r2"] = c.r2;
  j["quad_error"] = c.quad_error;
  j["extrapolated"] = c.extrapolated;
  return j;
}

}  // namespace rvlab

#endif  // RVLAB_REPORT_JSON_HPP
