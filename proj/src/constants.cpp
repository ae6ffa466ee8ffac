#include <algorithm>
#include <cmath>
#include <string>

#include "curvlab/checks.hpp"
#include "curvlab/error.hpp"

namespace curvlab {

namespace {

double c_n_general(double n) {
  return (n - 2.0) / std::sqrt(n * (n - 1.0)) +
         (n * n - n - 4.0) / (2.0 * std::sqrt((n - 2.0) * (n - 1.0) * n * (n + 1.0)));
}

CheckReport comparison(const std::string& name, double lhs, double rhs) {
  CheckReport r;
  r.name = name;
  r.kind = CheckKind::inequality;
  r.residual_or_margin = rhs - lhs;
  r.ok = lhs < rhs;
  r.verdict = r.ok ? "pass" : "fail";
  r.details["lhs"] = lhs;
  r.details["rhs"] = rhs;
  return r;
}

}  // namespace

ConstantsTable constants(int n) {
  if (n < 4) throw Error("constants need n >= 4, got " + std::to_string(n));
  const double d = n;
  ConstantsTable t;
  t.n = n;
  if (n == 4)
    t.c_n = std::sqrt(6.0) / 4.0;
  else if (n == 5)
    t.c_n = 4.0 * std::sqrt(10.0) / 15.0;
  else
    t.c_n = c_n_general(d);
  if (n == 4)
    t.e_n = std::sqrt(6.0);
  else if (n == 5)
    t.e5_coefficient = (2.0 * std::sqrt(15.0) - 4.0) / std::sqrt(10.0);
  else
    t.e_n = 4.0 * (d - 1.0) / (d * (d - 2.0)) / t.c_n;
  t.pointwise_threshold = 1.0 / std::sqrt(2.0 * (d - 1.0) * (d - 2.0));
  t.integral_factor_high = 2.0 / (d - 2.0) * std::sqrt(2.0 * (d - 1.0) / (d - 2.0));
  t.integral_factor_low = std::sqrt((d - 1.0) / (2.0 * (d - 2.0)));
  t.okumura_factor = std::sqrt((d - 2.0) / (2.0 * (d - 1.0)));
  t.lambda_pointwise = d / (std::sqrt(8.0 * d) * (d - 2.0));
  t.lambda_integral = std::sqrt(d) / (std::sqrt(8.0) * (d - 2.0));
  return t;
}

double integral_factor(int n) {
  const ConstantsTable t = constants(n);
  return n >= 7 ? t.integral_factor_high : t.integral_factor_low;
}

CheckReport check_constants_ordering(const Tolerances& /*tol*/) {
  CheckReport r;
  r.name = "constants_ordering";
  r.metric = "-";
  r.kind = CheckKind::inequality;

  const ConstantsTable c4 = constants(4);
  const ConstantsTable c5 = constants(5);
  r.details["C4"] = c4.c_n;
  r.details["C5"] = c5.c_n;
  r.details["C6"] = constants(6).c_n;
  r.details["E4"] = *c4.e_n;
  r.details["E5_coefficient"] = *c5.e5_coefficient;

  for (int n : {4, 5}) {
    const ConstantsTable t = constants(n);
    r.sub_checks.push_back(comparison("pointwise_ordering_n" + std::to_string(n),
                                      t.c_n * t.pointwise_threshold, 1.0 / n));
  }
  r.sub_checks.push_back(
      comparison("integral_vs_e5_coefficient_n5", c5.integral_factor_low, *c5.e5_coefficient));
  r.sub_checks.push_back(comparison("integral_vs_e4_n4", c4.integral_factor_low, *c4.e_n));

  // The n = 4 comparison against C_4 is false numerically; it is
  // reported and flagged, and does not fail the run.
  CheckReport printed = comparison("integral_vs_c4_n4", c4.integral_factor_low, c4.c_n);
  if (!printed.ok) {
    printed.ok = true;
    printed.verdict = "discrepancy";
    printed.note = "sqrt(3/4) exceeds sqrt(6)/4; the comparison against E_4 = sqrt(6) holds";
  }
  r.sub_checks.push_back(std::move(printed));

  bool ok = true;
  bool flagged = false;
  double worst = INFINITY;
  for (const auto& s : r.sub_checks) {
    ok = ok && s.ok;
    flagged = flagged || s.verdict == "discrepancy";
    if (s.verdict != "discrepancy") worst = std::min(worst, s.residual_or_margin);
  }
  r.ok = ok;
  r.residual_or_margin = worst;
  r.verdict = !ok ? "fail" : flagged ? "pass (discrepancy flagged)" : "pass";
  return r;
}

}  // namespace curvlab
