#pragma once

// Integration of curvature scalars over compact model manifolds (round
// spheres and products of two spheres) in their angular charts.
//
// Polar angles use Gauss-Legendre nodes on (0, pi), azimuths the periodic
// trapezoid rule. Coordinates the metric does not depend on (the azimuths)
// are integrated exactly when the integrand cannot depend on them either.
// Every integral is paired with the same rule at half resolution; the
// relative difference is reported as the refinement ratio.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvlab/checks.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/metric.hpp"

namespace curvlab {

struct IntegrationGrid {
  CompactModel model;
  int resolution = 0;
  /// Coordinates that were not collapsed even though the metric ignores them.
  std::vector<int> kept;
  /// Collapsed coordinate indices; their nodes sit at the interval midpoint.
  std::vector<int> collapsed;
  std::vector<std::vector<double>> nodes;
  /// Quadrature weight times sqrt(det g), times the length of every collapsed
  /// coordinate interval.
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// 64 per angle when every factor is a 2-sphere, 32 for S^4, 12 otherwise.
int default_resolution(const CompactModel& model);

/// Grid for an angular chart (see angular_chart). `keep` lists coordinates
/// the integrand depends on directly. Throws Error for a non-angular metric
/// or resolution < 2.
IntegrationGrid make_grid(const MetricSpec& angular, int resolution, std::vector<int> keep = {});

using ScalarField = std::function<double(const CurvatureBundle&)>;

struct Integral {
  double value = 0.0;
  double half_value = 0.0;
  /// |value - half_value| / |value|, or the plain difference when value = 0.
  double refinement = 0.0;
  std::size_t nodes = 0;
};

/// Integrates every field in one pass over the grid and its half-resolution
/// companion. `level` selects the bundle handed to the fields; nullopt passes
/// a bundle holding only dim, point and metric. Throws Error when the grid
/// does not belong to the metric.
std::vector<Integral> integrate(const MetricSpec& metric, std::span<const ScalarField> fields,
                                const IntegrationGrid& grid,
                                std::optional<CurvatureLevel> level = CurvatureLevel::algebraic);
Integral integrate(const MetricSpec& metric, const ScalarField& field, const IntegrationGrid& grid,
                   std::optional<CurvatureLevel> level = CurvatureLevel::algebraic);

/// (integral of |field|^p)^(1/p). Throws Error for p < 1.
Integral lp_norm(const MetricSpec& metric, const ScalarField& field, double p, const IntegrationGrid& grid,
                 std::optional<CurvatureLevel> level = CurvatureLevel::algebraic);

/// Volume form only: the integral of 1.
Integral volume(const MetricSpec& metric, const IntegrationGrid& grid);

struct SobolevQuotient {
  double quotient = 0.0;
  double half_quotient = 0.0;
  double refinement = 0.0;
  double numerator = 0.0;    // integral of |du|^2 + (n-2)/(4(n-1)) R u^2
  double denominator = 0.0;  // (integral of |u|^(2n/(n-2)))^((n-2)/n)
  std::size_t nodes = 0;
};

/// Conformal-Laplacian Rayleigh quotient of the test function u, an
/// expression in the chart coordinates and parameters. This is an upper bound
/// for the Sobolev constant, not its value. A grid resolution of 0 selects
/// the default. Throws Error when the denominator vanishes.
SobolevQuotient sobolev_quotient(const MetricSpec& angular, const std::string& u, int resolution = 0);

/// The integral pinching condition of the Einstein rigidity theorem with
/// Sobolev constant bounded above by the best quotient over `u_list`.
/// Verdicts: "condition-fails" (norm >= threshold even with the upper bound),
/// "holds-trivially" (the pinching norm vanishes), "inconclusive".
/// Throws Error for an empty u_list, n < 4, or R < 0 when 4 <= n <= 6.
CheckReport thm12_report(const MetricSpec& angular, const std::vector<std::string>& u_list, int resolution = 0,
                         const Tolerances& tol = {});

/// Stereographic point of a compact model mapped to its angular chart.
std::vector<double> stereographic_to_angular(const CompactModel& model, std::span<const double> x);

/// R, |W|^2 and |Ric0|^2 computed in the stereographic chart and in the
/// angular chart at mapped points must agree.
CheckReport check_chart_independence(const CompactModel& model, std::size_t count, std::uint64_t seed,
                                     const Tolerances& tol = {});

}  // namespace curvlab
