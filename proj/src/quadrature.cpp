#include "curvlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "curvlab/error.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule mapped to (lo, hi).
Rule gauss_legendre(int count, double lo, double hi) {
  const auto positive = boost::math::legendre_p_zeros<double>(count);
  std::vector<double> xs;
  for (double x : positive) {
    xs.push_back(x);
    if (x != 0.0) xs.push_back(-x);
  }
  std::sort(xs.begin(), xs.end());
  Rule r;
  const double half = 0.5 * (hi - lo);
  for (double x : xs) {
    const double dp = boost::math::legendre_p_prime(count, x);
    r.nodes.push_back(lo + half * (x + 1.0));
    r.weights.push_back(half * 2.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

// Periodic trapezoid rule on (lo, hi) with midpoint-shifted nodes.
Rule trapezoid(int count, double lo, double hi) {
  Rule r;
  const double h = (hi - lo) / count;
  for (int k = 0; k < count; ++k) {
    r.nodes.push_back(lo + (k + 0.5) * h);
    r.weights.push_back(h);
  }
  return r;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

double refinement_ratio(double value, double half) {
  const double diff = std::abs(value - half);
  return value != 0.0 ? diff / std::abs(value) : diff;
}

bool is_azimuth(const std::string& name) { return name.rfind("ph", 0) == 0; }

MetricAtPoint metric_at(const MetricSpec& spec, std::span<const double> point) {
  const int n = spec.dim();
  Tensor g(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = eval(spec.component(i, j), point, spec.parameters());
      g({i, j}) = v;
      g({j, i}) = v;
    }
  return MetricAtPoint::from_components(g);
}

void require_grid_matches(const MetricSpec& metric, const IntegrationGrid& grid) {
  if (!metric.compact_model() || !(*metric.compact_model() == grid.model) ||
      metric.coordinates() != angular_chart(grid.model).coordinates()) {
    throw Error("integration grid does not belong to metric \"" + metric.name() + "\"");
  }
}

CurvatureBundle node_bundle(const MetricSpec& metric, std::span<const double> point,
                            std::optional<CurvatureLevel> level) {
  if (level) return curvature_bundle(metric, point, *level);
  CurvatureBundle b;
  b.dim = metric.dim();
  b.point.assign(point.begin(), point.end());
  b.metric = metric_at(metric, point);
  return b;
}

// Sum of weight * field over the grid for every field.
std::vector<double> quadrature_sums(const MetricSpec& metric, std::span<const ScalarField> fields,
                                    const IntegrationGrid& grid, std::optional<CurvatureLevel> level) {
  const std::size_t nf = fields.size();
  std::vector<double> terms(nf * grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const CurvatureBundle b = node_bundle(metric, grid.nodes[i], level);
    for (std::size_t f = 0; f < nf; ++f) terms[f * grid.size() + i] = grid.weights[i] * fields[f](b);
  });
  std::vector<double> sums(nf);
  for (std::size_t f = 0; f < nf; ++f)
    sums[f] = pairwise_sum(std::span<const double>(terms).subspan(f * grid.size(), grid.size()));
  return sums;
}

IntegrationGrid half_grid(const MetricSpec& metric, const IntegrationGrid& grid) {
  return make_grid(metric, std::max(2, grid.resolution / 2), grid.kept);
}

MetricSpec stereographic_model(const CompactModel& model) {
  return model.is_sphere() ? sphere(model.p, model.a) : product_spheres(model.p, model.a, model.q, model.b);
}

// Inverse stereographic image of x on the unit sphere S^p, written in the
// hyperspherical angles of the angular chart. The projection pole is placed
// on the last embedding axis so that x = 0 lands at interior angles.
void append_sphere_angles(std::span<const double> x, std::vector<double>& out) {
  const std::size_t p = x.size();
  double s = 0.0;
  for (double v : x) s += v * v;
  std::vector<double> u(p + 1);
  for (std::size_t k = 0; k < p; ++k) u[k] = 2.0 * x[k] / (1.0 + s);
  u[p] = (s - 1.0) / (s + 1.0);
  for (std::size_t k = 0; k + 1 < p; ++k) {
    double tail = 0.0;
    for (std::size_t j = k + 1; j <= p; ++j) tail += u[j] * u[j];
    out.push_back(std::atan2(std::sqrt(tail), u[k]));
  }
  double ph = std::atan2(u[p], u[p - 1]);
  if (ph < 0.0) ph += 2.0 * kPi;
  out.push_back(ph);
}

}  // namespace

int default_resolution(const CompactModel& model) {
  if (model.p == 2 && (model.q == 0 || model.q == 2)) return 64;
  if (model.is_sphere() && model.p == 4) return 32;
  return 12;
}

IntegrationGrid make_grid(const MetricSpec& angular, int resolution, std::vector<int> keep) {
  if (!angular.compact_model()) throw Error("metric \"" + angular.name() + "\" has no angular integration chart");
  if (resolution < 2) throw Error("grid resolution must be at least 2");
  const CompactModel model = *angular.compact_model();
  const auto& names = angular.coordinates();
  if (names != angular_chart(model).coordinates()) {
    throw Error("metric \"" + angular.name() + "\" is not in angular coordinates");
  }
  const int n = angular.dim();
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  IntegrationGrid grid;
  grid.model = model;
  grid.resolution = resolution;
  grid.kept = keep;

  std::vector<Rule> rules;
  double collapsed_length = 1.0;
  for (int c = 0; c < n; ++c) {
    const auto [lo, hi] = angular.chart_domain()[static_cast<std::size_t>(c)];
    const bool kept = std::binary_search(keep.begin(), keep.end(), c);
    if (!kept && angular.is_cyclic(c)) {
      grid.collapsed.push_back(c);
      collapsed_length *= hi - lo;
      rules.push_back(Rule{{0.5 * (lo + hi)}, {1.0}});
    } else if (is_azimuth(names[static_cast<std::size_t>(c)])) {
      rules.push_back(trapezoid(resolution, lo, hi));
    } else {
      rules.push_back(gauss_legendre(resolution, lo, hi));
    }
  }

  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::size_t total = 1;
  for (const auto& r : rules) total *= r.nodes.size();
  grid.nodes.reserve(total);
  grid.weights.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<double> point(static_cast<std::size_t>(n));
    double w = collapsed_length;
    for (int c = 0; c < n; ++c) {
      const auto& r = rules[static_cast<std::size_t>(c)];
      point[static_cast<std::size_t>(c)] = r.nodes[idx[static_cast<std::size_t>(c)]];
      w *= r.weights[idx[static_cast<std::size_t>(c)]];
    }
    grid.nodes.push_back(std::move(point));
    grid.weights.push_back(w);
    for (int c = n - 1; c >= 0; --c) {
      auto& i = idx[static_cast<std::size_t>(c)];
      if (++i < rules[static_cast<std::size_t>(c)].nodes.size()) break;
      i = 0;
    }
  }
  std::vector<double> dets(total);
  parallel_for(total, [&](std::size_t k) { dets[k] = metric_at(angular, grid.nodes[k]).sqrt_det(); });
  for (std::size_t k = 0; k < total; ++k) grid.weights[k] *= dets[k];
  return grid;
}

std::vector<Integral> integrate(const MetricSpec& metric, std::span<const ScalarField> fields,
                                const IntegrationGrid& grid, std::optional<CurvatureLevel> level) {
  require_grid_matches(metric, grid);
  const IntegrationGrid half = half_grid(metric, grid);
  const auto full_sums = quadrature_sums(metric, fields, grid, level);
  const auto half_sums = quadrature_sums(metric, fields, half, level);
  std::vector<Integral> out(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    out[f].value = full_sums[f];
    out[f].half_value = half_sums[f];
    out[f].refinement = refinement_ratio(full_sums[f], half_sums[f]);
    out[f].nodes = grid.size();
  }
  return out;
}

Integral integrate(const MetricSpec& metric, const ScalarField& field, const IntegrationGrid& grid,
                   std::optional<CurvatureLevel> level) {
  return integrate(metric, std::span<const ScalarField>(&field, 1), grid, level).front();
}

Integral lp_norm(const MetricSpec& metric, const ScalarField& field, double p, const IntegrationGrid& grid,
                 std::optional<CurvatureLevel> level) {
  if (!(p >= 1.0)) throw Error("L^p norm needs p >= 1");
  const ScalarField power = [&](const CurvatureBundle& b) { return std::pow(std::abs(field(b)), p); };
  Integral r = integrate(metric, power, grid, level);
  r.value = std::pow(r.value, 1.0 / p);
  r.half_value = std::pow(r.half_value, 1.0 / p);
  r.refinement = refinement_ratio(r.value, r.half_value);
  return r;
}

Integral volume(const MetricSpec& metric, const IntegrationGrid& grid) {
  return integrate(metric, [](const CurvatureBundle&) { return 1.0; }, grid, std::nullopt);
}

namespace {

struct SobolevParts {
  std::vector<ScalarField> fields;
  std::vector<int> keep;
  double exponent = 0.0;  // 2n / (n-2)
};

SobolevParts sobolev_parts(const MetricSpec& angular, const std::string& u_text) {
  const int n = angular.dim();
  if (n < 3) throw Error("Sobolev quotient needs n >= 3");
  std::vector<std::string> params;
  for (const auto& [k, v] : angular.parameters()) params.push_back(k);
  const Expr u = Expr::parse(u_text, angular.coordinates(), params);
  SobolevParts parts;
  for (int c = 0; c < n; ++c)
    if (u.depends_on_coordinate(c)) parts.keep.push_back(c);
  parts.exponent = 2.0 * n / (n - 2.0);
  const double conformal = (n - 2.0) / (4.0 * (n - 1.0));
  const ParamValues values = angular.parameters();
  const double exponent = parts.exponent;
  parts.fields.push_back([u, values, conformal, n](const CurvatureBundle& b) {
    const Jet j = eval_jet(u, b.point, values, 1);
    const auto du = j.gradient();
    double grad2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        grad2 += b.metric.g_inv()({i, k}) * du[static_cast<std::size_t>(i)] * du[static_cast<std::size_t>(k)];
    return grad2 + conformal * b.scalar * j.value() * j.value();
  });
  parts.fields.push_back([u, values, exponent](const CurvatureBundle& b) {
    return std::pow(std::abs(eval(u, b.point, values)), exponent);
  });
  return parts;
}

double quotient_of(double numerator, double power_integral, int n) {
  const double denominator = std::pow(power_integral, (n - 2.0) / n);
  if (!(denominator > 0.0)) throw Error("Sobolev quotient: test function vanishes on the grid");
  return numerator / denominator;
}

}  // namespace

SobolevQuotient sobolev_quotient(const MetricSpec& angular, const std::string& u, int resolution) {
  if (!angular.compact_model()) throw Error("metric \"" + angular.name() + "\" has no angular integration chart");
  SobolevParts parts = sobolev_parts(angular, u);
  const int n = angular.dim();
  const int res = resolution > 0 ? resolution : default_resolution(*angular.compact_model());
  const IntegrationGrid grid = make_grid(angular, res, parts.keep);
  const auto ints = integrate(angular, parts.fields, grid, CurvatureLevel::algebraic);
  SobolevQuotient q;
  q.numerator = ints[0].value;
  q.denominator = std::pow(ints[1].value, (n - 2.0) / n);
  q.quotient = quotient_of(ints[0].value, ints[1].value, n);
  q.half_quotient = quotient_of(ints[0].half_value, ints[1].half_value, n);
  q.refinement = refinement_ratio(q.quotient, q.half_quotient);
  q.nodes = grid.size();
  return q;
}

CheckReport thm12_report(const MetricSpec& angular, const std::vector<std::string>& u_list, int resolution,
                         const Tolerances& tol) {
  if (u_list.empty()) throw Error("thm12 needs at least one test function for the Sobolev bound");
  if (!angular.compact_model()) throw Error("metric \"" + angular.name() + "\" has no angular integration chart");
  const CompactModel model = *angular.compact_model();
  const int n = angular.dim();
  const ConstantsTable c = constants(n);
  const double scalar = compact_oracle(model).scalar_curvature.value_or(0.0);
  if (n <= 6 && scalar < 0.0) throw Error("thm12 for 4 <= n <= 6 needs R >= 0");
  const int res = resolution > 0 ? resolution : default_resolution(model);

  CheckReport r;
  r.name = "thm12";
  r.metric = angular.name();
  r.kind = CheckKind::predicate;
  r.tolerance = tol.resolve("thm12");

  const double lambda = c.lambda_integral;
  const double p = n / 2.0;
  const ScalarField pinch = [&](const CurvatureBundle& b) { return norm(pinching_tensor(b, lambda), b.metric); };
  const Integral lhs = lp_norm(angular, pinch, p, make_grid(angular, res), CurvatureLevel::algebraic);

  double q_upper = INFINITY;
  std::string best;
  double worst_refinement = lhs.refinement;
  for (const auto& u : u_list) {
    const SobolevQuotient q = sobolev_quotient(angular, u, res);
    worst_refinement = std::max(worst_refinement, q.refinement);
    r.details["Q[" + u + "]"] = q.quotient;
    if (q.quotient < q_upper) {
      q_upper = q.quotient;
      best = u;
    }
  }
  const double factor = integral_factor(n);
  const double threshold = factor * q_upper;
  r.details["lhs"] = lhs.value;
  r.details["Q_upper"] = q_upper;
  r.details["factor"] = factor;
  r.details["threshold_upper"] = threshold;
  r.details["lambda"] = lambda;
  r.details["refinement"] = worst_refinement;
  r.points = lhs.nodes;
  r.residual_or_margin = threshold - lhs.value;
  r.ok = true;
  if (lhs.value <= r.tolerance * std::max(1.0, threshold)) {
    r.verdict = "holds-trivially";
    r.note = "pinching norm vanishes";
  } else if (lhs.value >= threshold) {
    r.verdict = "condition-fails";
    r.note = "norm exceeds the threshold computed from an upper bound of Q (best u = " + best + ")";
  } else {
    r.verdict = "inconclusive";
    r.note = "norm is below the threshold from an upper bound of Q; the true Q may be smaller";
  }
  return r;
}

std::vector<double> stereographic_to_angular(const CompactModel& model, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(model.dim())) throw Error("point dimension does not match the model");
  std::vector<double> out;
  const auto p = static_cast<std::size_t>(model.p);
  append_sphere_angles(x.first(p), out);
  if (!model.is_sphere()) append_sphere_angles(x.subspan(p), out);
  return out;
}

CheckReport check_chart_independence(const CompactModel& model, std::size_t count, std::uint64_t seed,
                                     const Tolerances& tol) {
  const MetricSpec stereo = stereographic_model(model);
  const MetricSpec angular = angular_chart(model);
  const auto points = sample_points(stereo, count, seed);
  std::vector<std::vector<double>> mapped;
  for (const auto& x : points) mapped.push_back(stereographic_to_angular(model, x));
  const auto a = bundles_at(stereo, points, CurvatureLevel::algebraic);
  const auto b = bundles_at(angular, mapped, CurvatureLevel::algebraic);

  CheckReport r;
  r.name = "chart_independence";
  r.metric = stereo.name();
  r.kind = CheckKind::identity;
  r.points = points.size();
  r.tolerance = tol.resolve("chart_independence");
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double pairs[3][2] = {
        {a[k].scalar, b[k].scalar},
        {norm2(a[k].weyl, a[k].metric), norm2(b[k].weyl, b[k].metric)},
        {norm2(a[k].traceless_ricci, a[k].metric), norm2(b[k].traceless_ricci, b[k].metric)},
    };
    for (const auto& pr : pairs) {
      const double res = std::abs(pr[0] - pr[1]) / std::max({1.0, std::abs(pr[0]), std::abs(pr[1])});
      if (std::isnan(res) || res > worst) {
        worst = res;
        at = k;
      }
    }
  }
  r.residual_or_margin = worst;
  if (!points.empty()) r.worst_point = points[at];
  r.ok = worst <= r.tolerance;
  r.verdict = r.ok ? "pass" : "fail";
  r.note = "R, |W|^2, |Ric0|^2 compared between stereographic and angular charts";
  return r;
}

}  // namespace curvlab
