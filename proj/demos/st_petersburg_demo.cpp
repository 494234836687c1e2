// Walks through the St. Petersburg tail at beta = 1: h_1 grows like log2 x
// and is slowly varying, while u(x) = x Fbar(x) keeps oscillating in [1, 2).

#include <cmath>
#include <cstdio>

#include "rvlab/rvlab.hpp"

int main() {
  const rvlab::TailModel model = rvlab::make_st_petersburg();

  std::printf("%6s %14s %14s %10s\n", "n", "h_1(2^n)", "V_1(2^n)", "u/h");
  for (int n = 1; n <= 40; n += 3) {
    const double x = std::ldexp(1.0, n);
    const auto h = rvlab::compute_h(model, 1.0, x);
    const double v = rvlab::compute_v(model, 1.0, x, h);
    std::printf("%6d %14.6f %14.6f %10.6f\n", n, h.value, v, (h.value - v) / h.value);
  }

  rvlab::AnalysisParams params;
  params.beta = 1.0;
  params.x_max = 1e30;
  params.points_per_decade = 64;
  const rvlab::TheoremReport report = rvlab::verify(model, params);
  std::printf("\nregime %s, consistent %s\n", rvlab::to_string(report.regime),
              report.consistent ? "yes" : "no");
  std::printf("h index %.4f, tail condition %s\n", report.h_rv.estimate.value_or(NAN),
              rvlab::to_string(report.f_rv.verdict));
  for (const auto& v : report.violations) std::printf("violation: %s\n", v.c_str());
  for (const auto& d : report.diagnostics) std::printf("note: %s\n", d.c_str());
  return 0;
}
