#ifndef RVLAB_CLI_HPP
#define RVLAB_CLI_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"

#include "rvlab/asymptotics.hpp"
#include "rvlab/catalog.hpp"
#include "rvlab/moments.hpp"
#include "rvlab/report_json.hpp"
#include "rvlab/theorem_verifier.hpp"

namespace rvlab::cli {

class UsageError : public Error {
public:
  using Error::Error;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kInconsistent = 2, kIndeterminate = 3 };

struct ModelSpec {
  std::string name;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> params;  // name, default ("" = required)
  std::function<TailModel(const std::map<std::string, std::string>&)> build;
};

namespace detail {

inline double to_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError("parameter " + key + ": '" + text + "' is not a number");
  return v;
}

}  // namespace detail

inline const std::vector<ModelSpec>& model_specs() {
  using Args = std::map<std::string, std::string>;
  static const std::vector<ModelSpec> specs{
      {"pareto", "Fbar(x) = (x/x_floor)^-alpha", {{"alpha", "1.5"}, {"x_floor", "1"}},
       [](const Args& a) {
         return make_pareto(detail::to_number("alpha", a.at("alpha")), detail::to_number("x_floor", a.at("x_floor")));
       }},
      {"st_petersburg", "Fbar(x) = 2^-floor(log2 x), x >= 2", {}, [](const Args&) { return make_st_petersburg(); }},
      {"geometric", "Fbar(x) = p^(-beta_g floor(log_p x)), x >= p", {{"beta_g", "1"}, {"p", "2"}},
       [](const Args& a) {
         return make_geometric_tail(detail::to_number("beta_g", a.at("beta_g")), detail::to_number("p", a.at("p")));
       }},
      {"inverse_log", "Fbar(x) = 1/log x, x >= e", {}, [](const Args&) { return make_inverse_log(); }},
      {"log_pareto", "Fbar(x) = C x^-alpha (log x)^a", {{"alpha", "0.5"}, {"a", "1"}},
       [](const Args& a) {
         return make_log_pareto(detail::to_number("alpha", a.at("alpha")), detail::to_number("a", a.at("a")));
       }},
      {"tabulated", "log-linear interpolation of an x,tail CSV table", {{"path", ""}},
       [](const Args& a) { return load_tabulated(a.at("path")); }},
  };
  return specs;
}

/// Builds a catalog model from its name and repeated key=value parameters.
inline TailModel make_model(const std::string& name, const std::vector<std::string>& key_values) {
  const auto& specs = model_specs();
  const auto it = std::find_if(specs.begin(), specs.end(), [&](const ModelSpec& s) { return s.name == name; });
  if (it == specs.end()) throw UsageError("unknown model '" + name + "' (see `list`)");

  std::map<std::string, std::string> args;
  for (const auto& [k, def] : it->params) args[k] = def;
  for (const std::string& kv : key_values) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    if (!args.count(key)) throw UsageError("model '" + name + "' has no parameter '" + key + "'");
    args[key] = kv.substr(eq + 1);
  }
  for (const auto& [k, v] : args)
    if (v.empty()) throw UsageError("model '" + name + "' requires --param " + k + "=...");
  return it->build(args);
}

/// Writes text to path atomically (temporary file, then rename), or to out
/// when path is empty.
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write '" + tmp.string() + "'");
    f << text;
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot move output into '" + path + "'");
  }
}

struct Options {
  std::string dist;
  std::vector<std::string> params;
  AnalysisParams analysis;
  std::vector<double> lambdas;
  std::string format;
  std::string output;
  std::string function = "h";
};

namespace detail {

inline void add_model_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--dist", o.dist, "Model name (see `list`)")->required();
  cmd.add_option("--param", o.params, "Model parameter key=value (repeatable)");
  cmd.add_option("--beta", o.analysis.beta, "Moment order beta > 0")->capture_default_str();
  cmd.add_option("--x-min", o.analysis.x_min, "Left end of the grid")->capture_default_str();
  cmd.add_option("--x-max", o.analysis.x_max, "Right end of the grid")->capture_default_str();
  cmd.add_option("--points-per-decade", o.analysis.points_per_decade, "Grid density (>= 8)")
      ->capture_default_str();
  cmd.add_option("--lambda", o.lambdas, "Scale factor > 1 (repeatable; default 2, e, 3, 8)");
  cmd.add_option("--rel-tol", o.analysis.rel_tol, "Quadrature relative tolerance")->capture_default_str();
  cmd.add_option("--eps-rho", o.analysis.eps_rho, "Boundary classification tolerance on rho")
      ->capture_default_str();
}

inline void add_output_options(CLI::App& cmd, Options& o, const std::string& default_format) {
  o.format = default_format;
  cmd.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd.add_option("--output", o.output, "Output path (default: standard output)");
}

inline AnalysisParams analysis_params(const Options& o) {
  AnalysisParams p = o.analysis;
  if (!o.lambdas.empty()) p.lambdas = o.lambdas;
  p.validate();
  return p;
}

inline std::string list_models(const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "name,params,summary\n";
    for (const auto& s : model_specs()) {
      os << s.name << ',';
      for (std::size_t i = 0; i < s.params.size(); ++i)
        os << (i ? ";" : "") << s.params[i].first << '=' << s.params[i].second;
      os << ",\"" << s.summary << "\"\n";
    }
    return os.str();
  }
  Json arr = Json::array();
  for (const auto& s : model_specs()) {
    Json e;
    e["name"] = s.name;
    e["summary"] = s.summary;
    Json p = Json::object();
    for (const auto& [k, v] : s.params) p[k] = v.empty() ? Json(nullptr) : Json(v);
    e["params"] = p;
    arr.push_back(e);
  }
  return arr.dump(2) + "\n";
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated moments and regular variation of heavy-tailed models"};
  app.require_subcommand(1);
  Options o;

  auto* list = app.add_subcommand("list", "List catalog models and their parameters");
  detail::add_output_options(*list, o, "json");

  auto* curve = app.add_subcommand("curve", "Export h, V, u and the ratios along the grid");
  detail::add_model_options(*curve, o);
  detail::add_output_options(*curve, o, "csv");

  auto* estimate = app.add_subcommand("estimate", "Estimate the regular-variation index of h, v, u or tail");
  detail::add_model_options(*estimate, o);
  estimate->add_option("--of", o.function, "Function to analyse")
      ->check(CLI::IsMember({"h", "v", "u", "tail"}))
      ->capture_default_str();
  detail::add_output_options(*estimate, o, "json");

  auto* verify_cmd = app.add_subcommand("verify", "Check all theorem conditions and report as JSON");
  detail::add_model_options(*verify_cmd, o);
  detail::add_output_options(*verify_cmd, o, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kFailure;
  }

  try {
    if (list->parsed()) {
      emit(detail::list_models(o.format), o.output, out);
      return kOk;
    }

    const AnalysisParams params = detail::analysis_params(o);
    const TailModel model = make_model(o.dist, o.params);
    for (const auto& w : model.warnings) err << "warning: " << w << '\n';

    if (curve->parsed()) {
      const MomentCurve c = build_curve(model, params);
      if (o.format == "csv") {
        std::ostringstream os;
        write_curve_csv(os, c);
        emit(os.str(), o.output, out);
      } else {
        emit(to_json(c).dump(2) + "\n", o.output, out);
      }
      return kOk;
    }

    if (estimate->parsed()) {
      if (o.format != "json") throw UsageError("estimate writes JSON only");
      const MomentCurve c = build_curve(model, params);
      std::vector<double> f;
      if (o.function == "h") f = c.h;
      else if (o.function == "v") f = c.v;
      else if (o.function == "u") f = c.u;
      else
        for (double x : c.grid) f.push_back(model(x));
      Json j;
      j["model"] = model.name;
      j["beta"] = params.beta;
      j["function"] = o.function;
      const Json est = to_json(estimate_rv_index(c.grid, f, params));
      for (const auto& [k, v] : est.items()) j[k] = v;
      emit(j.dump(2) + "\n", o.output, out);
      return kOk;
    }

    if (o.format != "json") throw UsageError("verify writes JSON only");
    const TheoremReport report = verify(model, params);
    emit(to_json(report).dump(2) + "\n", o.output, out);
    if (report.regime == Regime::Indeterminate) return kIndeterminate;
    return report.consistent ? kOk : kInconsistent;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace rvlab::cli

#endif  // RVLAB_CLI_HPP
