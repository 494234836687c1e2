#ifndef RVLAB_CATALOG_HPP
#define RVLAB_CATALOG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "rvlab/tail_model.hpp"

namespace rvlab {

namespace detail {

inline std::vector<double> single_breakpoint(double at, double a, double b) {
  if (at >= a && at <= b) return {at};
  return {};
}

/// floor(log_p x) computed so that x = p^k lands exactly on k.
inline long floor_log(double x, double p) {
  long k = static_cast<long>(std::floor(std::log(x) / std::log(p)));
  while (std::pow(p, static_cast<double>(k + 1)) <= x) ++k;
  while (std::pow(p, static_cast<double>(k)) > x) --k;
  return k;
}

}  // namespace detail

/// Fbar(x) = (x / x_floor)^-alpha above x_floor.
inline TailModel make_pareto(double alpha, double x_floor = 1.0) {
  if (!(alpha > 0.0)) throw ValidationError("pareto: alpha must be > 0");
  if (!(x_floor > 0.0)) throw ValidationError("pareto: x_floor must be > 0");

  TailModel m;
  m.name = "pareto";
  m.params = {{"alpha", alpha}, {"x_floor", x_floor}};
  m.support_floor = x_floor;
  m.tail = [alpha, x_floor](double x) { return x < x_floor ? 1.0 : std::pow(x / x_floor, -alpha); };
  m.breakpoints = [x_floor](double a, double b) { return detail::single_breakpoint(x_floor, a, b); };
  m.closed_form_h = [alpha, x_floor](double beta, double x) {
    if (x <= x_floor) return std::pow(x, beta);
    const double base = std::pow(x_floor, beta);
    if (alpha == beta) return base + beta * base * std::log(x / x_floor);
    const double s = beta - alpha;
    return base + beta * std::pow(x_floor, alpha) * (std::pow(x, s) - std::pow(x_floor, s)) / s;
  };
  m.ground_truth = GroundTruth{
      [alpha](double beta) -> std::optional<double> {
        if (alpha > beta) return std::nullopt;
        return beta - alpha;
      },
      true, false};
  return m;
}

/// Fbar(x) = p^(-beta_g * floor(log_p x)) for x >= p.
///
/// The tail is a staircase with atoms at every p^k, k >= 1, and the tail
/// weight x^beta_g Fbar(x) is log-periodic with period p. beta_g = 1, p = 2
/// is the St. Petersburg distribution.
inline TailModel make_geometric_tail(double beta_g, double p) {
  if (!(beta_g > 0.0)) throw ValidationError("geometric: beta_g must be > 0");
  if (!(p > 1.0)) throw ValidationError("geometric: p must be > 1");

  TailModel m;
  m.name = "geometric";
  m.params = {{"beta_g", beta_g}, {"p", p}};
  m.support_floor = p;
  m.piecewise_constant = true;
  m.log_period = p;
  m.tail = [beta_g, p](double x) {
    if (x < p) return 1.0;
    return std::pow(p, -beta_g * static_cast<double>(detail::floor_log(x, p)));
  };
  m.breakpoints = [p](double a, double b) {
    std::vector<double> out;
    if (b < p) return out;
    long k = std::max(1L, detail::floor_log(std::max(a, p), p));
    for (double xk = std::pow(p, static_cast<double>(k)); xk <= b;
         xk = std::pow(p, static_cast<double>(++k))) {
      if (xk >= a) out.push_back(xk);
    }
    return out;
  };
  m.point_masses = [beta_g, p](double a, double b) {
    std::vector<PointMass> out;
    if (b < p) return out;
    long k = std::max(1L, detail::floor_log(std::max(a, p), p));
    for (double xk = std::pow(p, static_cast<double>(k)); xk <= b;
         xk = std::pow(p, static_cast<double>(++k))) {
      if (xk <= a) continue;
      const double before = std::pow(p, -beta_g * static_cast<double>(k - 1));
      const double after = std::pow(p, -beta_g * static_cast<double>(k));
      out.push_back({xk, before - after});
    }
    return out;
  };
  // Geometric-series form: each full step [p^k, p^(k+1)) adds
  // (p^beta - 1) q^k with q = p^(beta - beta_g).
  m.closed_form_h = [beta_g, p](double beta, double x) {
    if (x < p) return std::pow(x, beta);
    const long big_k = detail::floor_log(x, p);
    const double pb = std::pow(p, beta);
    const double q = std::pow(p, beta - beta_g);
    const double steps = static_cast<double>(big_k - 1);
    const double full = (q == 1.0) ? steps : q * (std::pow(q, steps) - 1.0) / (q - 1.0);
    const double last_start = std::pow(p, static_cast<double>(big_k));
    return pb + (pb - 1.0) * full +
           std::pow(p, -beta_g * static_cast<double>(big_k)) *
               (std::pow(x, beta) - std::pow(last_start, beta));
  };
  // h is RV only at beta = beta_g; above it u = x^(beta-beta_g) * periodic.
  m.ground_truth = GroundTruth{
      [beta_g](double beta) -> std::optional<double> {
        if (beta == beta_g) return 0.0;
        return std::nullopt;
      },
      false, false};
  return m;
}

inline TailModel make_st_petersburg() {
  TailModel m = make_geometric_tail(1.0, 2.0);
  m.name = "st_petersburg";
  m.params.clear();
  return m;
}

/// Fbar(x) = 1 / log x for x >= e. A slowly varying tail in the de Haan class.
inline TailModel make_inverse_log() {
  constexpr double e = std::numbers::e;
  TailModel m;
  m.name = "inverse_log";
  m.support_floor = e;
  m.tail = [](double x) { return x < e ? 1.0 : 1.0 / std::log(x); };
  m.breakpoints = [](double a, double b) { return detail::single_breakpoint(e, a, b); };
  // beta * int_e^x y^(beta-1) / log y dy = beta * (Ei(beta log x) - Ei(beta)).
  m.closed_form_h = [](double beta, double x) {
    if (x <= e) return std::pow(x, beta);
    using boost::math::expint;
    return std::exp(beta) + beta * (expint(beta * std::log(x)) - expint(beta));
  };
  m.ground_truth = GroundTruth{[](double beta) -> std::optional<double> { return beta; }, true, true};
  return m;
}

/// Fbar(x) = C x^-alpha (log x)^a for x >= x0 = max(e, e^(a/alpha)), with C
/// chosen so that Fbar(x0) = 1.
inline TailModel make_log_pareto(double alpha, double a) {
  if (!(alpha > 0.0)) throw ValidationError("log_pareto: alpha must be > 0");
  if (!std::isfinite(a)) throw ValidationError("log_pareto: a must be finite");
  const double log_x0 = std::max(1.0, a / alpha);
  const double x0 = std::exp(log_x0);
  const double log_c = alpha * log_x0 - a * std::log(log_x0);

  TailModel m;
  m.name = "log_pareto";
  m.params = {{"alpha", alpha}, {"a", a}};
  m.support_floor = x0;
  m.tail = [=](double x) {
    if (x < x0) return 1.0;
    const double lx = std::log(x);
    return std::min(1.0, std::exp(log_c - alpha * lx + a * std::log(lx)));
  };
  m.breakpoints = [x0](double lo, double hi) { return detail::single_breakpoint(x0, lo, hi); };
  m.ground_truth = GroundTruth{
      [alpha, a](double beta) -> std::optional<double> {
        if (alpha < beta) return beta - alpha;
        if (alpha == beta && a >= -1.0) return 0.0;
        return std::nullopt;
      },
      true, false};
  return m;
}

enum class Interpolation { LogLinear };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, std::size_t line, const char* column) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
    throw ParseError(std::string("cannot parse ") + column + " value '" + std::string(field) + "'", line);
  return v;
}

inline std::string join_rows(const std::vector<std::size_t>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? ", " : "") << rows[i];
  return os.str();
}

}  // namespace detail

/// Reads a `x,tail` CSV table from a stream. Line numbers in errors are
/// 1-based and count the header.
inline TailModel parse_tabulated(std::istream& in, const std::string& source = "tabulated",
                                 Interpolation = Interpolation::LogLinear) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file, expected header 'x,tail'", 1);
  ++line_no;
  std::string_view header = line;
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  {
    const auto comma = header.find(',');
    if (comma == std::string_view::npos || detail::trim(header.substr(0, comma)) != "x" ||
        detail::trim(header.substr(comma + 1)) != "tail")
      throw ParseError("expected header 'x,tail'", line_no);
  }

  std::vector<double> xs, ts;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected exactly two fields", line_no);
    xs.push_back(detail::parse_number(row.substr(0, comma), line_no, "x"));
    ts.push_back(detail::parse_number(row.substr(comma + 1), line_no, "tail"));
    lines.push_back(line_no);
  }
  if (xs.size() < 2) throw ValidationError("tabulated tail needs at least two rows");

  std::vector<std::size_t> bad_x, bad_range, bad_monotone;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || (i > 0 && !(xs[i] > xs[i - 1]))) bad_x.push_back(lines[i]);
    if (ts[i] < 0.0 || ts[i] > 1.0) bad_range.push_back(lines[i]);
    if (i > 0 && ts[i] > ts[i - 1]) bad_monotone.push_back(lines[i]);
  }
  if (!bad_x.empty())
    throw ValidationError("x must be positive and strictly increasing; offending rows: " +
                              detail::join_rows(bad_x),
                          bad_x);
  if (!bad_range.empty())
    throw ValidationError("tail must lie in [0,1]; offending rows: " + detail::join_rows(bad_range),
                          bad_range);
  if (!bad_monotone.empty())
    throw ValidationError("tail must be non-increasing; offending rows: " +
                              detail::join_rows(bad_monotone),
                          bad_monotone);

  auto table = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(
      std::move(xs), std::move(ts));

  TailModel m;
  m.name = "tabulated";
  m.support_floor = table->first.front();
  m.extrapolated_beyond = table->first.back();
  m.warnings.push_back("tail extrapolated as constant beyond x=" + std::to_string(table->first.back()) +
                       " (" + source + ")");
  m.tail = [table](double x) {
    const auto& [tx, tt] = *table;
    if (x < tx.front()) return 1.0;
    if (x >= tx.back()) return tt.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(tx.begin(), tx.end(), x) - tx.begin());
    const std::size_t lo = hi - 1;
    const double w = (std::log(x) - std::log(tx[lo])) / (std::log(tx[hi]) - std::log(tx[lo]));
    if (tt[lo] > 0.0 && tt[hi] > 0.0)
      return std::exp(std::log(tt[lo]) + w * (std::log(tt[hi]) - std::log(tt[lo])));
    return tt[lo] + w * (tt[hi] - tt[lo]);
  };
  m.breakpoints = [table](double a, double b) {
    std::vector<double> out;
    for (double x : table->first)
      if (x >= a && x <= b) out.push_back(x);
    return out;
  };
  return m;
}

inline TailModel load_tabulated(const std::string& path, Interpolation interp = Interpolation::LogLinear) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_tabulated(in, path, interp);
}

}  // namespace rvlab

#endif  // RVLAB_CATALOG_HPP
