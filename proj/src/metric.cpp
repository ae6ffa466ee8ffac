#include "curvlab/metric.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "curvlab/error.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> coordinate_names(int n, const std::string& prefix = "x",
                                          int first = 1) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(first + i));
  return names;
}

std::string sum_of_squares(const std::vector<std::string>& names, std::size_t begin,
                           std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end; ++i) {
    if (!s.empty()) s += " + ";
    s += names[i] + "^2";
  }
  return s;
}

std::vector<std::string> diagonal_grid(int n, const std::vector<std::string>& diag) {
  std::vector<std::string> grid(static_cast<std::size_t>(n * n), "0");
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i * n + i)] = diag[static_cast<std::size_t>(i)];
  return grid;
}

std::vector<Interval> cube(int n, double half_width) {
  return std::vector<Interval>(static_cast<std::size_t>(n), {-half_width, half_width});
}

int parse_int(const ZooParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw Error("zoo parameter \"" + key + "\" is required");
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size()) {
    throw Error("zoo parameter \"" + key + "\" must be an integer, got \"" + it->second + "\"");
  }
  return v;
}

double parse_double(const ZooParams& params, const std::string& key, std::optional<double> fallback = {}) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (fallback) return *fallback;
    throw Error("zoo parameter \"" + key + "\" is required");
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size()) {
    throw Error("zoo parameter \"" + key + "\" must be a number, got \"" + it->second + "\"");
  }
  return v;
}

void require_dim(int n, int lo = 2) {
  if (n < lo || n > kMaxJetDim) {
    throw Error("dimension must lie in [" + std::to_string(lo) + ", " +
                std::to_string(kMaxJetDim) + "], got " + std::to_string(n));
  }
}

}  // namespace

double uniform01(std::uint64_t raw) { return static_cast<double>(raw >> 11) * 0x1.0p-53; }

MetricSpec MetricSpec::create(std::string name, std::vector<std::string> coordinates,
                              ParamValues parameters, const std::vector<std::string>& components,
                              std::vector<Interval> sampling_box,
                              std::optional<MetricOracle> oracle) {
  const int n = static_cast<int>(coordinates.size());
  require_dim(n, 1);
  if (components.size() != static_cast<std::size_t>(n * n)) {
    throw Error("metric \"" + name + "\" needs " + std::to_string(n * n) + " components");
  }
  if (sampling_box.size() != static_cast<std::size_t>(n)) {
    throw Error("sampling box of metric \"" + name + "\" must have one interval per coordinate");
  }
  for (const auto& [lo, hi] : sampling_box) {
    if (!(lo <= hi)) throw Error("sampling box interval with lo > hi");
  }
  MetricSpec spec;
  spec.name_ = std::move(name);
  spec.coordinates_ = std::move(coordinates);
  spec.parameters_ = std::move(parameters);
  spec.box_ = std::move(sampling_box);
  spec.oracle_ = std::move(oracle);
  std::vector<std::string> param_names;
  for (const auto& [k, v] : spec.parameters_) param_names.push_back(k);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const auto& text = components[static_cast<std::size_t>(i * n + j)];
      spec.texts_.push_back(text);
      spec.exprs_.push_back(Expr::parse(text, spec.coordinates_, param_names));
    }
  }
  return spec;
}

void MetricSpec::set_chart_domain(std::vector<Interval> domain) {
  if (domain.size() != coordinates_.size()) throw Error("chart domain arity mismatch");
  domain_ = std::move(domain);
}

namespace {
std::size_t upper_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: rows before i contribute n + (n-1) + ... entries.
  return static_cast<std::size_t>(i * n - i * (i - 1) / 2 + (j - i));
}
}  // namespace

const Expr& MetricSpec::component(int i, int j) const { return exprs_.at(upper_index(dim(), i, j)); }

const std::string& MetricSpec::component_text(int i, int j) const {
  return texts_.at(upper_index(dim(), i, j));
}

bool MetricSpec::contains(std::span<const double> point, double slack) const {
  const auto& dom = chart_domain();
  if (point.size() != dom.size()) return false;
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] >= dom[i].first - slack && point[i] <= dom[i].second + slack)) return false;
  }
  return true;
}

bool MetricSpec::is_cyclic(int index) const {
  for (const auto& e : exprs_) {
    if (e.depends_on_coordinate(index)) return false;
  }
  return true;
}

MetricSpec euclidean(int n) {
  require_dim(n);
  MetricOracle oracle;
  oracle.scalar_curvature = 0.0;
  oracle.einstein = true;
  oracle.conformally_flat = true;
  oracle.weyl_norm2 = 0.0;
  oracle.traceless_ricci_norm2 = 0.0;
  return MetricSpec::create("euclidean(" + std::to_string(n) + ")", coordinate_names(n), {},
                            diagonal_grid(n, std::vector<std::string>(static_cast<std::size_t>(n), "1")),
                            cube(n, 1.0), oracle);
}

MetricSpec sphere(int n, double r) {
  require_dim(n);
  if (!(r > 0.0)) throw Error("sphere radius must be positive");
  const auto names = coordinate_names(n);
  const std::string factor = "4*r^2/(1 + " + sum_of_squares(names, 0, names.size()) + ")^2";
  CompactModel model{n, r, 0, 1.0};
  auto spec = MetricSpec::create("sphere(" + std::to_string(n) + ", " + fmt(r) + ")", names,
                                 {{"r", r}},
                                 diagonal_grid(n, std::vector<std::string>(static_cast<std::size_t>(n), factor)),
                                 cube(n, 0.5), compact_oracle(model));
  spec.set_compact_model(model);
  return spec;
}

MetricSpec hyperbolic(int n) {
  require_dim(n);
  const auto names = coordinate_names(n);
  const std::string factor = "4/(1 - (" + sum_of_squares(names, 0, names.size()) + "))^2";
  MetricOracle oracle;
  oracle.scalar_curvature = -static_cast<double>(n * (n - 1));
  oracle.einstein = true;
  oracle.conformally_flat = true;
  oracle.weyl_norm2 = 0.0;
  oracle.traceless_ricci_norm2 = 0.0;
  // |x| <= 0.5 on the box.
  auto spec = MetricSpec::create("hyperbolic(" + std::to_string(n) + ")", names, {},
                                 diagonal_grid(n, std::vector<std::string>(static_cast<std::size_t>(n), factor)),
                                 cube(n, 0.5 / std::sqrt(static_cast<double>(n))), oracle);
  spec.set_chart_domain(cube(n, 1.0 / std::sqrt(static_cast<double>(n)) - 1e-9));
  return spec;
}

MetricSpec product_spheres(int p, double a, int q, double b) {
  if (p < 2 || q < 2) throw Error("product_spheres factors must have dimension >= 2");
  require_dim(p + q);
  if (!(a > 0.0) || !(b > 0.0)) throw Error("product_spheres radii must be positive");
  const int n = p + q;
  const auto names = coordinate_names(n);
  const std::string f1 = "4*a^2/(1 + " + sum_of_squares(names, 0, static_cast<std::size_t>(p)) + ")^2";
  const std::string f2 = "4*b^2/(1 + " + sum_of_squares(names, static_cast<std::size_t>(p), names.size()) + ")^2";
  std::vector<std::string> diag;
  for (int i = 0; i < n; ++i) diag.push_back(i < p ? f1 : f2);
  CompactModel model{p, a, q, b};
  auto spec = MetricSpec::create("product_spheres(" + std::to_string(p) + ", " + fmt(a) + ", " +
                                     std::to_string(q) + ", " + fmt(b) + ")",
                                 names, {{"a", a}, {"b", b}}, diagonal_grid(n, diag), cube(n, 0.5),
                                 compact_oracle(model));
  spec.set_compact_model(model);
  return spec;
}

MetricSpec conformal(int n, const std::string& f) {
  require_dim(n);
  const auto names = coordinate_names(n);
  // Validate f on its own so that errors point at the user's text.
  Expr::parse(f, names);
  const std::string factor = "exp(2*(" + f + "))";
  MetricOracle oracle;
  oracle.conformally_flat = true;
  oracle.weyl_norm2 = 0.0;
  return MetricSpec::create("conformal(" + std::to_string(n) + ", " + f + ")", names, {},
                            diagonal_grid(n, std::vector<std::string>(static_cast<std::size_t>(n), factor)),
                            cube(n, 0.5), oracle);
}

MetricSpec perturbation(int n, std::uint64_t seed, double eps) {
  if (n < 4 || n > 6) throw Error("perturbation metrics are defined for n in {4, 5, 6}");
  if (!(eps >= 0.0) || eps > 0.05) throw Error("perturbation eps must lie in [0, 0.05]");
  const auto names = coordinate_names(n);
  const auto& table = MultiIndexTable::get(n, 4);
  std::mt19937_64 rng(seed);

  // Gershgorin: |q_ij(x)| <= sum_alpha |c_alpha| h^|alpha| on the box, so
  // eps * max_i sum_j bound_ij < 1 keeps every eigenvalue of delta + eps q positive.
  std::vector<double> bound(static_cast<std::size_t>(n * n), 0.0);
  std::vector<std::string> grid(static_cast<std::size_t>(n * n), "0");
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::string poly;
      double b = 0.0;
      for (std::size_t k = 0; k < table.size(); ++k) {
        const double c = 2.0 * uniform01(rng()) - 1.0;
        b += std::abs(c) * std::pow(kPerturbationHalfWidth, table.degree(k));
        std::string term = fmt(c);
        for (int v = 0; v < n; ++v) {
          const int e = table.index(k)[static_cast<std::size_t>(v)];
          if (e == 0) continue;
          term += "*" + names[static_cast<std::size_t>(v)];
          if (e > 1) term += "^" + std::to_string(e);
        }
        if (poly.empty()) {
          poly = term;
        } else {
          poly += (term[0] == '-') ? " - " + term.substr(1) : " + " + term;
        }
      }
      const std::string entry = (i == j ? "1 + eps*(" : "eps*(") + poly + ")";
      grid[static_cast<std::size_t>(i * n + j)] = entry;
      bound[static_cast<std::size_t>(i * n + j)] = b;
      bound[static_cast<std::size_t>(j * n + i)] = b;
    }
  }
  double worst_row = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += bound[static_cast<std::size_t>(i * n + j)];
    worst_row = std::max(worst_row, row);
  }
  if (eps * worst_row >= 1.0) {
    throw Error("perturbation eps = " + fmt(eps) +
                " is too large for guaranteed definiteness (Gershgorin bound " +
                fmt(eps * worst_row) + " >= 1)");
  }
  MetricOracle oracle;
  if (eps == 0.0) {
    oracle.scalar_curvature = 0.0;
    oracle.einstein = true;
    oracle.conformally_flat = true;
  }
  return MetricSpec::create("perturbation(" + std::to_string(n) + ", " + std::to_string(seed) +
                                ", " + fmt(eps) + ")",
                            names, {{"eps", eps}}, grid, cube(n, kPerturbationHalfWidth),
                            eps == 0.0 ? std::optional<MetricOracle>(oracle) : std::nullopt);
}

MetricSpec zoo(const std::string& name, const ZooParams& params) {
  auto with_default_n = [&](int fallback) {
    return params.count("n") ? parse_int(params, "n") : fallback;
  };
  auto check_known = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw Error("zoo member \"" + name + "\" does not take parameter \"" + k + "\"");
    }
  };
  if (name == "euclidean") {
    check_known({"n"});
    return euclidean(with_default_n(4));
  }
  if (name == "sphere") {
    check_known({"n", "r"});
    return sphere(with_default_n(4), parse_double(params, "r", 1.0));
  }
  if (name == "hyperbolic") {
    check_known({"n"});
    return hyperbolic(with_default_n(4));
  }
  if (name == "product_spheres") {
    check_known({"n", "p", "a", "q", "b"});
    const int p = parse_int(params, "p");
    const int q = parse_int(params, "q");
    if (params.count("n") && parse_int(params, "n") != p + q) {
      throw Error("product_spheres: p + q = " + std::to_string(p + q) +
                  " differs from requested dimension " + params.at("n"));
    }
    return product_spheres(p, parse_double(params, "a", 1.0), q, parse_double(params, "b", 1.0));
  }
  if (name == "conformal") {
    check_known({"n", "f"});
    auto it = params.find("f");
    if (it == params.end()) throw Error("zoo parameter \"f\" is required");
    return conformal(with_default_n(4), it->second);
  }
  if (name == "perturbation") {
    check_known({"n", "seed", "eps"});
    return perturbation(with_default_n(4), static_cast<std::uint64_t>(parse_int(params, "seed")),
                        parse_double(params, "eps", 0.02));
  }
  throw Error("unknown zoo member \"" + name + "\"");
}

MetricSpec angular_chart(const CompactModel& model) {
  if (model.p < 2 || (model.q != 0 && model.q < 2)) {
    throw Error("angular charts need sphere factors of dimension >= 2");
  }
  const int n = model.dim();
  require_dim(n);
  std::vector<std::string> names;
  std::vector<std::string> diag;
  std::vector<Interval> box;
  std::vector<Interval> domain;
  constexpr double pi = std::numbers::pi;
  auto add_factor = [&](int dim, const std::string& radius, const std::string& suffix) {
    std::vector<std::string> polar;
    for (int k = 1; k < dim; ++k) polar.push_back("th" + suffix + std::to_string(k));
    const std::string azimuth = "ph" + suffix;
    std::string prefix = radius + "^2";
    for (int k = 0; k < dim; ++k) {
      const std::string& coord = k + 1 < dim ? polar[static_cast<std::size_t>(k)] : azimuth;
      names.push_back(coord);
      diag.push_back(prefix);
      if (k + 1 < dim) {
        prefix += "*sin(" + coord + ")^2";
        box.emplace_back(0.15, pi - 0.15);
        domain.emplace_back(0.0, pi);
      } else {
        box.emplace_back(0.0, 2.0 * pi);
        domain.emplace_back(0.0, 2.0 * pi);
      }
    }
  };
  ParamValues params;
  std::string label;
  if (model.is_sphere()) {
    add_factor(model.p, "r", "");
    params["r"] = model.a;
    label = "angular_sphere(" + std::to_string(model.p) + ", " + fmt(model.a) + ")";
  } else {
    add_factor(model.p, "a", "1_");
    add_factor(model.q, "b", "2_");
    params["a"] = model.a;
    params["b"] = model.b;
    label = "angular_product_spheres(" + std::to_string(model.p) + ", " + fmt(model.a) + ", " +
            std::to_string(model.q) + ", " + fmt(model.b) + ")";
  }
  auto spec = MetricSpec::create(label, names, params, diagonal_grid(n, diag), box,
                                 compact_oracle(model));
  spec.set_chart_domain(domain);
  spec.set_compact_model(model);
  return spec;
}

MetricOracle compact_oracle(const CompactModel& model) {
  const int n = model.dim();
  // Orthonormal frame: R_ijkl = k_B (d_ik d_jl - d_il d_jk) when all four
  // indices lie in the same block B, zero otherwise.
  auto block = [&](int i) { return i < model.p ? 0 : 1; };
  const double kappa[2] = {1.0 / (model.a * model.a), model.q ? 1.0 / (model.b * model.b) : 0.0};
  Tensor riem(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const int bi = block(i);
          if (block(j) != bi || block(k) != bi || block(l) != bi) continue;
          riem({i, j, k, l}) = kappa[bi] * ((i == k) * (j == l) - (i == l) * (j == k));
        }
  Tensor g(n, 2);
  for (int i = 0; i < n; ++i) g({i, i}) = 1.0;
  const auto m = MetricAtPoint::from_components(g);
  const Tensor ric = contract(riem, 1, 3, m);
  const double R = contract(ric, 0, 1, m).data()[0];
  const Tensor ric0 = traceless_part(ric, m);
  Tensor weyl = riem - kulkarni_nomizu(ric, g) * (1.0 / (n - 2));
  weyl += kulkarni_nomizu(g, g) * (R / (2.0 * (n - 1) * (n - 2)));

  MetricOracle oracle;
  oracle.scalar_curvature = R;
  oracle.traceless_ricci_norm2 = norm2(ric0, m);
  oracle.einstein = model.is_sphere() ||
                    std::abs((model.p - 1) * kappa[0] - (model.q - 1) * kappa[1]) <=
                        1e-14 * std::max(1.0, std::abs(R));
  oracle.conformally_flat = model.is_sphere();
  oracle.weyl_norm2 = norm2(weyl, m);
  return oracle;
}

std::vector<std::vector<double>> sample_points(const MetricSpec& spec, std::size_t count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> points;
  points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> x;
    for (const auto& [lo, hi] : spec.sampling_box()) x.push_back(lo + (hi - lo) * uniform01(rng()));
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace curvlab
