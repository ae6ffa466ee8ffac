#pragma once

// Named identities, inequalities and pinching predicates evaluated on sampled
// curvature bundles.
//
// Identity residuals are g-norms of the defect divided by the largest term
// entering the identity (with an absolute floor of 1e-12); derivative
// identities also include the bundle's reference scale in that maximum.
// Inequality margins are (right - left) / max-term; a check passes when the
// margin is >= -tolerance. Predicates (pinching conditions) are informational:
// they report where the condition holds and only fail when the outcome
// contradicts the corresponding rigidity statement.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvlab/curvature.hpp"
#include "curvlab/metric.hpp"

namespace curvlab {

enum class CheckKind { identity, inequality, predicate };

struct CheckReport {
  std::string name;
  std::string metric;
  CheckKind kind = CheckKind::identity;
  std::string verdict;
  /// Drives the exit status. Inapplicable checks and informational
  /// predicates are ok.
  bool ok = true;
  bool applicable = true;
  double residual_or_margin = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;
  std::vector<double> worst_point;
  std::map<std::string, double> details;
  std::string note;
  std::vector<CheckReport> sub_checks;
};

std::string to_string(CheckKind kind);

/// Tolerance overrides keyed by check name, or "check.sub_check".
class Tolerances {
 public:
  void set(const std::string& name, double value);
  double get(const std::string& name, double fallback) const;
  /// Override if set, else the built-in default. Throws Error for unknown names.
  double resolve(const std::string& name) const;
  const std::map<std::string, double>& overrides() const { return overrides_; }

 private:
  std::map<std::string, double> overrides_;
};

/// Every name accepted by Tolerances (checks and sub-checks).
const std::vector<std::string>& tolerance_names();
double default_tolerance(const std::string& name);

inline constexpr double kAbsoluteFloor = 1e-12;
/// |dR| at or below this counts as constant scalar curvature.
inline constexpr double kConstantScalarGate = 1e-6;
/// |Ric0| at or below this counts as Einstein.
inline constexpr double kEinsteinGate = 1e-7;
/// Kato is only tested where |Ric0| exceeds this.
inline constexpr double kKatoSupport = 1e-6;

using Bundles = std::span<const CurvatureBundle>;

/// Full-level bundles at `count` seeded points of the sampling box.
std::vector<CurvatureBundle> sample_bundles(const MetricSpec& spec, std::size_t count, std::uint64_t seed,
                                            CurvatureLevel level = CurvatureLevel::full);
std::vector<CurvatureBundle> bundles_at(const MetricSpec& spec, const std::vector<std::vector<double>>& points,
                                        CurvatureLevel level = CurvatureLevel::full);

// ---- constants ----

struct ConstantsTable {
  int n = 0;
  double c_n = 0.0;
  /// E_n for n != 5.
  std::optional<double> e_n;
  /// (2 sqrt 15 - 4) / sqrt 10, for n = 5 only.
  std::optional<double> e5_coefficient;
  /// 1 / sqrt(2 (n-1)(n-2)): pointwise pinching threshold on R.
  double pointwise_threshold = 0.0;
  /// (2 / (n-2)) sqrt(2 (n-1) / (n-2)): integral threshold for n >= 7.
  double integral_factor_high = 0.0;
  /// sqrt((n-1) / (2 (n-2))): integral threshold for 4 <= n <= 6.
  double integral_factor_low = 0.0;
  /// sqrt((n-2) / (2 (n-1))).
  double okumura_factor = 0.0;
  /// n / (sqrt(8n) (n-2)), coefficient of Ric0 o g in the pointwise condition.
  double lambda_pointwise = 0.0;
  /// sqrt(n) / (sqrt(8) (n-2)), coefficient of Ric0 o g in the integral condition.
  double lambda_integral = 0.0;
};

/// Throws Error for n < 4.
ConstantsTable constants(int n);

/// Integral threshold factor for dimension n (branch chosen by n).
double integral_factor(int n);

CheckReport check_constants_ordering(const Tolerances& tol = {});

// ---- pointwise checks ----

CheckReport check_symmetry_catalog(const std::string& metric, Bundles b, const Tolerances& tol = {});
CheckReport check_oracle(const MetricSpec& spec, Bundles b, const Tolerances& tol = {});
CheckReport check_kato(const std::string& metric, Bundles b, const Tolerances& tol = {});
CheckReport check_ricci_identity(const std::string& metric, Bundles b, const Tolerances& tol = {});
CheckReport check_contracted_bach(const std::string& metric, Bundles b, const Tolerances& tol = {});
/// Empty `lambdas` means {0, +-n/(n-2), +-1}.
CheckReport check_okumura(const std::string& metric, Bundles b, std::vector<double> lambdas = {},
                          const Tolerances& tol = {});
CheckReport check_weyl_laplacian_einstein(const std::string& metric, Bundles b, const Tolerances& tol = {});
CheckReport pinch_pointwise_thm11(const std::string& metric, Bundles b, const Tolerances& tol = {});
/// C_n |W| < R / n on Einstein metrics.
CheckReport pinch_einstein_pointwise(const std::string& metric, Bundles b, const Tolerances& tol = {});

// ---- point quantities shared with tests and quadrature ----

/// W_ijkl A^ik A^jl for a symmetric A.
double weyl_pairing(const Tensor& w, const Tensor& a, const MetricAtPoint& m);
/// tr((g^-1 A)^3).
double cubic_trace(const Tensor& a, const MetricAtPoint& m);
/// W + c Ric0 o g.
Tensor pinching_tensor(const CurvatureBundle& b, double c);

}  // namespace curvlab
