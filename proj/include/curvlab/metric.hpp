#pragma once

// Metric definitions: a coordinate chart with symmetric component
// expressions, plus the reference "zoo" of closed-form model metrics and
// seeded random perturbation metrics.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/expr.hpp"

namespace curvlab {

/// Closed-form facts about a metric, used as test oracles.
struct MetricOracle {
  std::optional<double> scalar_curvature;
  std::optional<bool> einstein;
  std::optional<bool> conformally_flat;
  std::optional<double> weyl_norm2;
  std::optional<double> traceless_ricci_norm2;
};

/// A compact model manifold that can be integrated over in an angular chart.
/// A round sphere S^p(a) is encoded with q = 0.
struct CompactModel {
  int p = 0;
  double a = 1.0;
  int q = 0;
  double b = 1.0;

  bool is_sphere() const { return q == 0; }
  int dim() const { return p + q; }
  friend bool operator==(const CompactModel&, const CompactModel&) = default;
};

using Interval = std::pair<double, double>;

class MetricSpec {
 public:
  /// `components` is a row-major n x n grid of expression strings; the upper
  /// triangle is authoritative and the lower triangle is mirrored from it.
  static MetricSpec create(std::string name, std::vector<std::string> coordinates,
                           ParamValues parameters, const std::vector<std::string>& components,
                           std::vector<Interval> sampling_box,
                           std::optional<MetricOracle> oracle = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const ParamValues& parameters() const { return parameters_; }
  const std::vector<Interval>& sampling_box() const { return box_; }
  /// Region where the chart is valid; defaults to the sampling box.
  const std::vector<Interval>& chart_domain() const { return domain_.empty() ? box_ : domain_; }
  void set_chart_domain(std::vector<Interval> domain);
  const std::optional<MetricOracle>& oracle() const { return oracle_; }
  const std::optional<CompactModel>& compact_model() const { return compact_; }
  void set_compact_model(CompactModel model) { compact_ = model; }

  const Expr& component(int i, int j) const;
  /// Source text of component (i, j), i <= j.
  const std::string& component_text(int i, int j) const;

  /// Point lies in the chart domain.
  bool contains(std::span<const double> point, double slack = 1e-12) const;
  /// True if no component depends on coordinate `index`.
  bool is_cyclic(int index) const;

 private:
  std::string name_;
  std::vector<std::string> coordinates_;
  ParamValues parameters_;
  std::vector<std::string> texts_;  // upper triangle, row-major
  std::vector<Expr> exprs_;         // upper triangle, row-major
  std::vector<Interval> box_;
  std::vector<Interval> domain_;
  std::optional<MetricOracle> oracle_;
  std::optional<CompactModel> compact_;
};

/// Zoo parameters are strings so that `conformal` can take an expression.
using ZooParams = std::map<std::string, std::string>;

/// name in {euclidean, sphere, hyperbolic, product_spheres, conformal, perturbation}.
MetricSpec zoo(const std::string& name, const ZooParams& params);

MetricSpec euclidean(int n);
/// Stereographic chart g = 4 r^2 / (1 + |x|^2)^2 delta.
MetricSpec sphere(int n, double r);
/// Unit ball model g = 4 / (1 - |x|^2)^2 delta.
MetricSpec hyperbolic(int n);
/// S^p(a) x S^q(b), each factor in its own stereographic chart.
MetricSpec product_spheres(int p, double a, int q, double b);
/// g = exp(2 f) delta, f an expression in x1..xn.
MetricSpec conformal(int n, const std::string& f);
/// g = delta + eps * q(x), q symmetric with random degree <= 4 polynomial
/// entries (coefficients uniform in [-1, 1]); sampled on [-0.2, 0.2]^n.
/// Positive definiteness on the box follows from a Gershgorin bound.
MetricSpec perturbation(int n, std::uint64_t seed, double eps);

inline constexpr double kPerturbationHalfWidth = 0.2;

/// Hyperspherical (angular) chart of a compact model, used for integration.
/// Polar angles th* lie in (0, pi), azimuths ph* in (0, 2 pi).
MetricSpec angular_chart(const CompactModel& model);

/// Oracle data of a compact model, derived from its block constant-curvature
/// Riemann tensor.
MetricOracle compact_oracle(const CompactModel& model);

/// `count` points drawn uniformly from the sampling box; reproducible in seed.
std::vector<std::vector<double>> sample_points(const MetricSpec& spec, std::size_t count,
                                               std::uint64_t seed);

/// Uniform double in [0, 1) built from the raw 64-bit Mersenne Twister
/// stream, independent of the standard library's distribution code.
double uniform01(std::uint64_t raw);

}  // namespace curvlab
