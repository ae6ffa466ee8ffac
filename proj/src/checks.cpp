#include "curvlab/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <limits>

#include "curvlab/error.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {

// ---- plumbing ----

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::identity:
      return "identity";
    case CheckKind::inequality:
      return "inequality";
    case CheckKind::predicate:
      return "predicate";
  }
  return "identity";
}

void Tolerances::set(const std::string& name, double value) {
  const auto& known = tolerance_names();
  if (std::find(known.begin(), known.end(), name) == known.end()) throw Error("unknown tolerance name: " + name);
  if (!(value >= 0.0) || !std::isfinite(value)) throw Error("tolerance for " + name + " must be finite and >= 0");
  overrides_[name] = value;
}

double Tolerances::get(const std::string& name, double fallback) const {
  auto it = overrides_.find(name);
  return it == overrides_.end() ? fallback : it->second;
}

namespace {

// Default tolerances. Identities involving fourth metric derivatives use
// 1e-6, purely algebraic ones 1e-8 or tighter.
struct DefaultTolerance {
  const char* name;
  double value;
};

constexpr std::array kDefaults = {
    DefaultTolerance{"symmetry_catalog.riemann_symmetries", 1e-8},
    DefaultTolerance{"symmetry_catalog.weyl_traceless", 1e-8},
    DefaultTolerance{"symmetry_catalog.weyl_forms", 1e-10},
    DefaultTolerance{"symmetry_catalog.decomposition", 1e-9},
    DefaultTolerance{"symmetry_catalog.cotton_antisymmetry", 1e-9},
    DefaultTolerance{"symmetry_catalog.cotton_forms", 1e-9},
    DefaultTolerance{"symmetry_catalog.bach_symmetry", 1e-7},
    DefaultTolerance{"symmetry_catalog.divergence_cotton", 1e-6},
    DefaultTolerance{"symmetry_catalog.bach_forms", 1e-6},
    DefaultTolerance{"symmetry_catalog.second_bianchi", 1e-7},
    DefaultTolerance{"symmetry_catalog.ricci_commutator", 1e-6},
    DefaultTolerance{"symmetry_catalog.metric_compatibility", 1e-10},
    DefaultTolerance{"symmetry_catalog.kato", 1e-8},
    DefaultTolerance{"oracle_curvature.scalar_curvature", 1e-7},
    DefaultTolerance{"oracle_curvature.einstein", 1e-7},
    DefaultTolerance{"oracle_curvature.conformally_flat", 1e-7},
    DefaultTolerance{"oracle_curvature.weyl_norm2", 1e-6},
    DefaultTolerance{"oracle_curvature.traceless_ricci_norm2", 1e-6},
    DefaultTolerance{"oracle_curvature.cotton", 1e-7},
    DefaultTolerance{"oracle_curvature.bach", 1e-7},
    DefaultTolerance{"kato", 1e-8},
    DefaultTolerance{"ricci_identity", 1e-6},
    DefaultTolerance{"contracted_bach", 1e-6},
    DefaultTolerance{"okumura", 1e-9},
    DefaultTolerance{"okumura.norm_equality", 1e-9},
    DefaultTolerance{"okumura.lambda_zero_reduction", 1e-12},
    DefaultTolerance{"weyl_laplacian_einstein", 1e-6},
    DefaultTolerance{"pinch_thm11", 1e-5},
    DefaultTolerance{"pinch_einstein_pointwise", 1e-5},
    DefaultTolerance{"thm12", 1e-9},
    DefaultTolerance{"chart_independence", 1e-6},
};


double scale_of(std::initializer_list<double> terms) {
  double s = kAbsoluteFloor;
  for (double t : terms) s = std::max(s, std::abs(t));
  return s;
}

// Largest value (residuals) or smallest value (margins) and where it occurred.
// NaN always wins so that it surfaces as a failure.
struct Worst {
  double value = 0.0;
  std::size_t index = 0;
  bool set = false;

  void max(double v, std::size_t i) {
    if (!set || std::isnan(v) || v > value) take(v, i);
  }
  void min(double v, std::size_t i) {
    if (!set || std::isnan(v) || v < value) take(v, i);
  }

 private:
  void take(double v, std::size_t i) {
    if (set && std::isnan(value)) return;
    value = v;
    index = i;
    set = true;
  }
};

CheckReport base_report(const std::string& name, const std::string& metric, CheckKind kind, Bundles b) {
  CheckReport r;
  r.name = name;
  r.metric = metric;
  r.kind = kind;
  r.points = b.size();
  return r;
}

CheckReport identity_report(const std::string& name, const std::string& metric, Bundles b, const Worst& w,
                            double tol) {
  CheckReport r = base_report(name, metric, CheckKind::identity, b);
  r.residual_or_margin = w.value;
  r.tolerance = tol;
  if (w.set && !b.empty()) r.worst_point = b[w.index].point;
  r.ok = w.value <= tol;
  r.verdict = r.ok ? "pass" : "fail";
  return r;
}

CheckReport inequality_report(const std::string& name, const std::string& metric, Bundles b, const Worst& w,
                              double tol) {
  CheckReport r = base_report(name, metric, CheckKind::inequality, b);
  r.residual_or_margin = w.value;
  r.tolerance = tol;
  if (w.set && !b.empty()) r.worst_point = b[w.index].point;
  r.ok = w.value >= -tol;
  r.verdict = r.ok ? "pass" : "fail";
  return r;
}

CheckReport inapplicable(const std::string& name, const std::string& metric, CheckKind kind, Bundles b,
                         const std::string& reason) {
  CheckReport r = base_report(name, metric, kind, b);
  r.applicable = false;
  r.ok = true;
  r.verdict = "inapplicable";
  r.note = reason;
  return r;
}

void require_points(Bundles b, const char* what) {
  if (b.empty()) throw Error(std::string(what) + ": no sample points");
}

void require_full(Bundles b, const char* what) {
  require_points(b, what);
  for (const auto& x : b)
    if (x.level != CurvatureLevel::full) throw Error(std::string(what) + " needs full curvature bundles");
}

CheckReport combine(const std::string& name, const std::string& metric, Bundles b, std::vector<CheckReport> subs) {
  CheckReport r = base_report(name, metric, CheckKind::identity, b);
  std::size_t failed = 0;
  for (const auto& s : subs) failed += s.ok ? 0 : 1;
  r.ok = failed == 0;
  r.residual_or_margin = static_cast<double>(failed);
  r.tolerance = 0.0;
  r.note = "residual_or_margin counts failed sub-checks";
  r.verdict = r.ok ? "pass" : "fail (" + std::to_string(failed) + " sub-checks)";
  r.sub_checks = std::move(subs);
  return r;
}

bool constant_scalar(Bundles b, double* worst) {
  double m = 0.0;
  for (const auto& x : b) m = std::max(m, norm(x.grad_scalar, x.metric));
  *worst = m;
  return m <= kConstantScalarGate;
}

double max_traceless(Bundles b) {
  double m = 0.0;
  for (const auto& x : b) m = std::max(m, norm(x.traceless_ricci, x.metric));
  return m;
}

}  // namespace

double default_tolerance(const std::string& name) {
  for (const auto& d : kDefaults)
    if (name == d.name) return d.value;
  throw Error("no default tolerance for " + name);
}

double Tolerances::resolve(const std::string& name) const { return get(name, default_tolerance(name)); }

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : kDefaults) v.emplace_back(d.name);
    return v;
  }();
  return names;
}

// ---- sampling ----

std::vector<CurvatureBundle> bundles_at(const MetricSpec& spec, const std::vector<std::vector<double>>& points,
                                        CurvatureLevel level) {
  std::vector<CurvatureBundle> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = curvature_bundle(spec, points[i], level); });
  return out;
}

std::vector<CurvatureBundle> sample_bundles(const MetricSpec& spec, std::size_t count, std::uint64_t seed,
                                            CurvatureLevel level) {
  return bundles_at(spec, sample_points(spec, count, seed), level);
}

// ---- point quantities ----

double weyl_pairing(const Tensor& w, const Tensor& a, const MetricAtPoint& m) {
  const int n = w.dim();
  const auto nn = static_cast<std::size_t>(n);
  const Tensor up = raise_all(a, m);
  double s = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k)
        for (std::size_t l = 0; l < nn; ++l) s += w[((i * nn + j) * nn + k) * nn + l] * up[i * nn + k] * up[j * nn + l];
  return s;
}

double cubic_trace(const Tensor& a, const MetricAtPoint& m) {
  const auto nn = static_cast<std::size_t>(a.dim());
  std::vector<double> mix(nn * nn, 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k) mix[i * nn + j] += m.g_inv()[i * nn + k] * a[k * nn + j];
  double s = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k) s += mix[i * nn + j] * mix[j * nn + k] * mix[k * nn + i];
  return s;
}

Tensor pinching_tensor(const CurvatureBundle& b, double c) {
  return b.weyl + c * kulkarni_nomizu(b.traceless_ricci, b.metric.g());
}

// ---- symmetry catalog ----

namespace {

CheckReport catalog_identity(const std::string& sub, const std::string& metric, Bundles b, const Tolerances& tol,
                             const std::function<double(const CurvatureBundle&)>& residual) {
  Worst w;
  for (std::size_t i = 0; i < b.size(); ++i) w.max(residual(b[i]), i);
  const std::string key = "symmetry_catalog." + sub;
  return identity_report(sub, metric, b, w, tol.resolve(key));
}

double riemann_symmetry_residual(const CurvatureBundle& x) {
  const Tensor& rm = x.riemann;
  const MetricAtPoint& m = x.metric;
  const std::array<int, 4> swap_ij{1, 0, 2, 3}, swap_kl{0, 1, 3, 2}, swap_pairs{2, 3, 0, 1};
  const std::array<int, 4> cyc1{1, 2, 0, 3}, cyc2{2, 0, 1, 3};
  double d = 0.0;
  d = std::max(d, norm(rm + permute(rm, swap_ij), m));
  d = std::max(d, norm(rm + permute(rm, swap_kl), m));
  d = std::max(d, norm(rm - permute(rm, swap_pairs), m));
  d = std::max(d, norm(rm + permute(rm, cyc1) + permute(rm, cyc2), m));
  return d / scale_of({norm(rm, m)});
}

double weyl_traceless_residual(const CurvatureBundle& x) {
  double d = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int c = a + 1; c < 4; ++c) d = std::max(d, norm(contract(x.weyl, a, c, x.metric), x.metric));
  return d / scale_of({norm(x.riemann, x.metric), norm(x.weyl, x.metric)});
}

Tensor decomposition(const CurvatureBundle& x) {
  const int n = x.dim;
  const Tensor& g = x.metric.g();
  return x.weyl + (1.0 / (n - 2)) * kulkarni_nomizu(x.traceless_ricci, g) +
         (x.scalar / (2.0 * n * (n - 1))) * kulkarni_nomizu(g, g);
}

// [nabla_c, nabla_d] Ric0_ab predicted from the curvature action.
Tensor commutator_prediction(const CurvatureBundle& x) {
  const auto nn = static_cast<std::size_t>(x.dim);
  std::vector<double> mix(nn * nn, 0.0);  // Ric0^e_b
  for (std::size_t e = 0; e < nn; ++e)
    for (std::size_t b = 0; b < nn; ++b)
      for (std::size_t f = 0; f < nn; ++f) mix[e * nn + b] += x.metric.g_inv()[e * nn + f] * x.traceless_ricci[f * nn + b];
  Tensor out(x.dim, 4);
  auto R = [&](std::size_t e, std::size_t a, std::size_t c, std::size_t d) {
    return x.riemann[((e * nn + a) * nn + c) * nn + d];
  };
  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t b = 0; b < nn; ++b)
      for (std::size_t c = 0; c < nn; ++c)
        for (std::size_t d = 0; d < nn; ++d) {
          double s = 0.0;
          for (std::size_t e = 0; e < nn; ++e) s -= R(e, a, c, d) * mix[e * nn + b] + R(e, b, c, d) * mix[e * nn + a];
          out[((a * nn + b) * nn + c) * nn + d] = s;
        }
  return out;
}

}  // namespace

CheckReport check_symmetry_catalog(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "symmetry_catalog");
  const int n = b.front().dim;
  std::vector<CheckReport> subs;
  auto add = [&](const std::string& sub, const std::function<double(const CurvatureBundle&)>& f) {
    subs.push_back(catalog_identity(sub, metric, b, tol, f));
  };
  auto skip = [&](const std::string& sub, const std::string& why) {
    subs.push_back(inapplicable(sub, metric, CheckKind::identity, b, why));
  };

  add("riemann_symmetries", riemann_symmetry_residual);
  add("metric_compatibility", [](const CurvatureBundle& x) {
    return x.grad_metric.max_abs() / scale_of({x.christoffel.max_abs() * x.metric.g().max_abs()});
  });
  add("second_bianchi", [](const CurvatureBundle& x) {
    const double c = (x.dim - 2.0) / (2.0 * x.dim);
    const Tensor div = contract(x.grad_traceless_ricci, 0, 2, x.metric);
    return norm(div - c * x.grad_scalar, x.metric) /
           scale_of({norm(div, x.metric), c * norm(x.grad_scalar, x.metric), x.reference_scale});
  });
  add("ricci_commutator", [](const CurvatureBundle& x) {
    const std::array<int, 4> swap{0, 1, 3, 2};
    const Tensor comm = permute(x.hess_traceless_ricci, swap) - x.hess_traceless_ricci;
    const Tensor pred = commutator_prediction(x);
    return norm(comm - pred, x.metric) /
           scale_of({norm(x.hess_traceless_ricci, x.metric),
                     norm(x.riemann, x.metric) * norm(x.traceless_ricci, x.metric), x.reference_scale});
  });
  add("cotton_antisymmetry", [](const CurvatureBundle& x) {
    const std::array<int, 3> swap{1, 0, 2};
    return norm(x.cotton + permute(x.cotton, swap), x.metric) /
           scale_of({norm(x.cotton, x.metric), norm(x.grad_ricci, x.metric), x.reference_scale});
  });
  add("cotton_forms", [](const CurvatureBundle& x) {
    return norm(x.cotton - x.cotton_alt, x.metric) /
           scale_of({norm(x.cotton, x.metric), norm(x.grad_ricci, x.metric), x.reference_scale});
  });

  if (n >= 3) {
    add("weyl_traceless", weyl_traceless_residual);
    add("weyl_forms", [](const CurvatureBundle& x) {
      return norm(x.weyl - x.weyl_alt, x.metric) / scale_of({norm(x.riemann, x.metric)});
    });
    add("decomposition", [](const CurvatureBundle& x) {
      return norm(x.riemann - decomposition(x), x.metric) / scale_of({norm(x.riemann, x.metric)});
    });
  } else {
    for (const char* s : {"weyl_traceless", "weyl_forms", "decomposition"}) skip(s, "needs n >= 3");
  }

  if (n >= 4) {
    add("divergence_cotton", [](const CurvatureBundle& x) {
      const double c = (x.dim - 3.0) / (x.dim - 2.0);
      const Tensor div = weyl_divergence(x);
      return norm(div + c * x.cotton, x.metric) /
             scale_of({norm(div, x.metric), c * norm(x.cotton, x.metric), x.reference_scale});
    });
    add("bach_symmetry", [](const CurvatureBundle& x) {
      const std::array<int, 2> swap{1, 0};
      const Tensor b1 = bach_direct(x);
      const Tensor b2 = bach_cotton_form(x);
      const double d = std::max(norm(b1 - permute(b1, swap), x.metric), norm(b2 - permute(b2, swap), x.metric));
      return d / scale_of({norm(b1, x.metric), norm(b2, x.metric), x.reference_scale});
    });
    add("bach_forms", [](const CurvatureBundle& x) {
      const Tensor b1 = bach_direct(x);
      const Tensor b2 = bach_cotton_form(x);
      return norm(b1 - b2, x.metric) / scale_of({norm(b1, x.metric), norm(b2, x.metric), x.reference_scale});
    });
  } else {
    for (const char* s : {"divergence_cotton", "bach_symmetry", "bach_forms"}) skip(s, "needs n >= 4");
  }

  CheckReport kato = check_kato(metric, b, tol);
  kato.name = "kato";
  kato.tolerance = tol.get("symmetry_catalog.kato", kato.tolerance);
  if (kato.applicable) {
    kato.ok = kato.residual_or_margin >= -kato.tolerance;
    kato.verdict = kato.ok ? "pass" : "fail";
  }
  subs.push_back(std::move(kato));

  return combine("symmetry_catalog", metric, b, std::move(subs));
}

// ---- oracle ----

CheckReport check_oracle(const MetricSpec& spec, Bundles b, const Tolerances& tol) {
  const std::string& metric = spec.name();
  require_full(b, "oracle_curvature");
  if (!spec.oracle()) return inapplicable("oracle_curvature", metric, CheckKind::identity, b, "metric has no oracle");
  const MetricOracle& o = *spec.oracle();
  const int n = spec.dim();
  std::vector<CheckReport> subs;
  auto key = [](const char* s) { return std::string("oracle_curvature.") + s; };

  auto per_point = [&](const char* sub, const std::function<double(const CurvatureBundle&)>& f) {
    Worst w;
    for (std::size_t i = 0; i < b.size(); ++i) w.max(f(b[i]), i);
    return identity_report(sub, metric, b, w, tol.resolve(key(sub)));
  };
  // A property that must be absent: the quantity must stay above tolerance.
  auto absent = [&](const char* sub, const std::function<double(const CurvatureBundle&)>& f) {
    Worst w;
    for (std::size_t i = 0; i < b.size(); ++i) w.min(f(b[i]), i);
    CheckReport r = base_report(sub, metric, CheckKind::identity, b);
    r.residual_or_margin = w.value;
    r.tolerance = tol.resolve(key(sub));
    r.worst_point = b[w.index].point;
    r.ok = w.value > r.tolerance;
    r.verdict = r.ok ? "pass" : "fail";
    r.note = "expected nonzero; residual_or_margin is the smallest norm";
    return r;
  };

  if (o.scalar_curvature) {
    const double r0 = *o.scalar_curvature;
    subs.push_back(per_point("scalar_curvature", [&](const CurvatureBundle& x) {
      return std::abs(x.scalar - r0) / scale_of({r0});
    }));
  }
  auto traceless = [](const CurvatureBundle& x) { return norm(x.traceless_ricci, x.metric); };
  auto weyl_norm = [](const CurvatureBundle& x) { return norm(x.weyl, x.metric); };
  if (o.einstein) subs.push_back(*o.einstein ? per_point("einstein", traceless) : absent("einstein", traceless));
  if (o.conformally_flat && n >= 4)
    subs.push_back(*o.conformally_flat ? per_point("conformally_flat", weyl_norm)
                                       : absent("conformally_flat", weyl_norm));
  if (o.weyl_norm2) {
    const double w2 = *o.weyl_norm2;
    subs.push_back(per_point("weyl_norm2", [&](const CurvatureBundle& x) {
      return std::abs(norm2(x.weyl, x.metric) - w2) / scale_of({w2, norm2(x.riemann, x.metric)});
    }));
  }
  if (o.traceless_ricci_norm2) {
    const double t2 = *o.traceless_ricci_norm2;
    subs.push_back(per_point("traceless_ricci_norm2", [&](const CurvatureBundle& x) {
      return std::abs(norm2(x.traceless_ricci, x.metric) - t2) / scale_of({t2, norm2(x.ricci, x.metric)});
    }));
  }
  const bool einstein = o.einstein.value_or(false);
  const bool conf_flat = o.conformally_flat.value_or(false);
  if (einstein)
    subs.push_back(per_point("cotton", [](const CurvatureBundle& x) { return norm(x.cotton, x.metric); }));
  if (n >= 4 && (conf_flat || (einstein && n == 4))) {
    subs.push_back(per_point("bach", [](const CurvatureBundle& x) {
      return std::max(norm(bach_direct(x), x.metric), norm(bach_cotton_form(x), x.metric));
    }));
  }
  return combine("oracle_curvature", metric, b, std::move(subs));
}

// ---- Kato ----

CheckReport check_kato(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "kato");
  Worst w;
  std::size_t supported = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    if (!(norm(x.traceless_ricci, x.metric) > kKatoSupport)) continue;
    ++supported;
    const double lhs = norm(x.grad_norm_traceless_ricci, x.metric);
    const double rhs = norm(x.grad_traceless_ricci, x.metric);
    w.min(rhs - lhs, i);
  }
  if (supported == 0)
    return inapplicable("kato", metric, CheckKind::inequality, b, "Ric0 vanishes at every sampled point");
  CheckReport r = inequality_report("kato", metric, b, w, tol.resolve("kato"));
  r.details["supported_points"] = static_cast<double>(supported);
  r.note = "margin is |nabla Ric0| - |nabla |Ric0|| (absolute slack)";
  return r;
}

// ---- constant scalar curvature identities ----

CheckReport check_ricci_identity(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "ricci_identity");
  double dr = 0.0;
  if (!constant_scalar(b, &dr)) {
    CheckReport r = inapplicable("ricci_identity", metric, CheckKind::identity, b, "scalar curvature not constant");
    r.details["max_grad_scalar"] = dr;
    return r;
  }
  if (b.front().dim < 3)
    return inapplicable("ricci_identity", metric, CheckKind::identity, b, "needs n >= 3");
  Worst w;
  double lhs_at = 0.0, rhs_at = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const int n = x.dim;
    const MetricAtPoint& m = x.metric;
    const Tensor& t = x.traceless_ricci;
    const Tensor div2 = contract(x.hess_traceless_ricci, 1, 3, m);
    const double lhs = inner(div2, t, m);
    const double wrr = weyl_pairing(x.weyl, t, m);
    const double tr3 = cubic_trace(t, m);
    const double t2 = norm2(t, m);
    const double rhs = -wrr + n / (n - 2.0) * tr3 + x.scalar / (n - 1.0) * t2;
    const double scale = scale_of({norm(div2, m) * norm(t, m), norm(x.weyl, m) * t2, n / (n - 2.0) * tr3,
                                   x.scalar / (n - 1.0) * t2});
    const double res = std::abs(lhs - rhs) / scale;
    w.max(res, i);
    if (w.index == i) {
      lhs_at = lhs;
      rhs_at = rhs;
    }
  }
  CheckReport r = identity_report("ricci_identity", metric, b, w, tol.resolve("ricci_identity"));
  r.details["lhs"] = lhs_at;
  r.details["rhs"] = rhs_at;
  r.details["max_grad_scalar"] = dr;
  return r;
}

CheckReport check_contracted_bach(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "contracted_bach");
  double dr = 0.0;
  if (!constant_scalar(b, &dr)) {
    CheckReport r = inapplicable("contracted_bach", metric, CheckKind::identity, b, "scalar curvature not constant");
    r.details["max_grad_scalar"] = dr;
    return r;
  }
  if (b.front().dim < 4)
    return inapplicable("contracted_bach", metric, CheckKind::identity, b, "needs n >= 4");
  Worst w;
  double lhs_at = 0.0, rhs_at = 0.0, bach_at = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const int n = x.dim;
    const MetricAtPoint& m = x.metric;
    const Tensor& t = x.traceless_ricci;
    const Tensor bach = bach_direct(x);
    const Tensor lap = traceless_ricci_laplacian(x);
    const double lhs = (n - 2.0) * inner(bach, t, m);
    const double lap_term = inner(t, lap, m);
    const double tr3 = cubic_trace(t, m);
    const double t2 = norm2(t, m);
    const double wrr = weyl_pairing(x.weyl, t, m);
    const double rhs = lap_term - n / (n - 2.0) * tr3 - x.scalar / (n - 1.0) * t2 + 2.0 * wrr;
    const double scale =
        scale_of({(n - 2.0) * norm(bach, m) * norm(t, m), norm(lap, m) * norm(t, m), n / (n - 2.0) * tr3,
                  x.scalar / (n - 1.0) * t2, 2.0 * norm(x.weyl, m) * t2});
    w.max(std::abs(lhs - rhs) / scale, i);
    if (w.index == i) {
      lhs_at = lhs;
      rhs_at = rhs;
      bach_at = norm(bach, m);
    }
  }
  CheckReport r = identity_report("contracted_bach", metric, b, w, tol.resolve("contracted_bach"));
  r.details["lhs"] = lhs_at;
  r.details["rhs"] = rhs_at;
  r.details["bach_norm"] = bach_at;
  r.details["max_grad_scalar"] = dr;
  return r;
}

// ---- Okumura-type estimate ----

CheckReport check_okumura(const std::string& metric, Bundles b, std::vector<double> lambdas, const Tolerances& tol) {
  require_points(b, "okumura");
  const int n = b.front().dim;
  if (n < 4) return inapplicable("okumura", metric, CheckKind::inequality, b, "needs n >= 4");
  if (lambdas.empty()) {
    const double l = n / (n - 2.0);
    lambdas = {0.0, l, -l, 1.0, -1.0};
  }
  const double factor = constants(n).okumura_factor;
  const double tol_ineq = tol.resolve("okumura");
  const double tol_eq = tol.resolve("okumura.norm_equality");
  const double tol_zero = tol.resolve("okumura.lambda_zero_reduction");

  std::vector<CheckReport> subs;
  Worst eq;
  for (double lambda : lambdas) {
    Worst w;
    Worst zero;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto& x = b[i];
      const MetricAtPoint& m = x.metric;
      const Tensor& t = x.traceless_ricci;
      const double t2 = norm2(t, m);
      const Tensor pinch = pinching_tensor(x, lambda / std::sqrt(2.0 * n));
      const double pinch2 = norm2(pinch, m);
      const double lhs = std::abs(-weyl_pairing(x.weyl, t, m) + lambda * cubic_trace(t, m));
      const double rhs = factor * std::sqrt(pinch2) * t2;
      w.min((rhs - lhs) / scale_of({lhs, rhs}), i);

      const double w2 = norm2(x.weyl, m);
      const double expected = w2 + 2.0 * (n - 2.0) * lambda * lambda / n * t2;
      eq.max(std::abs(pinch2 - expected) / scale_of({pinch2, expected}), i);
      if (lambda == 0.0) {
        const double reduced = factor * std::sqrt(w2) * t2;
        zero.max(std::abs(rhs - reduced) / scale_of({rhs, reduced}), i);
      }
    }
    char label[64];
    std::snprintf(label, sizeof label, "lambda=%.9g", lambda);
    CheckReport r = inequality_report(label, metric, b, w, tol_ineq);
    r.details["lambda"] = lambda;
    subs.push_back(std::move(r));
    if (lambda == 0.0) subs.push_back(identity_report("lambda_zero_reduction", metric, b, zero, tol_zero));
  }
  subs.push_back(identity_report("norm_equality", metric, b, eq, tol_eq));
  CheckReport r = combine("okumura", metric, b, std::move(subs));
  r.kind = CheckKind::inequality;
  return r;
}

// ---- Einstein Weyl Laplacian ----

CheckReport check_weyl_laplacian_einstein(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "weyl_laplacian_einstein");
  const int n = b.front().dim;
  if (n < 4) return inapplicable("weyl_laplacian_einstein", metric, CheckKind::inequality, b, "needs n >= 4");
  const double tr = max_traceless(b);
  if (tr > kEinsteinGate) {
    CheckReport r = inapplicable("weyl_laplacian_einstein", metric, CheckKind::inequality, b, "metric not Einstein");
    r.details["max_traceless_ricci"] = tr;
    return r;
  }
  const double cn = constants(n).c_n;
  Worst w;
  double max_abs_margin = 0.0, lhs_at = 0.0, rhs_at = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const MetricAtPoint& m = x.metric;
    const double wn = norm(x.weyl, m);
    const double lap = inner(weyl_laplacian(x), x.weyl, m);
    const double grad2 = norm2(x.grad_weyl, m);
    const double kato = (n + 1.0) / (n - 1.0) * norm2(x.grad_norm_weyl, m);
    const double quad = 2.0 / n * x.scalar * wn * wn;
    const double cubic = 2.0 * cn * wn * wn * wn;
    const double lhs = lap + grad2;
    const double rhs = kato + quad - cubic;
    max_abs_margin = std::max(max_abs_margin, std::abs(lhs - rhs));
    w.min((lhs - rhs) / scale_of({lap, grad2, kato, quad, cubic}), i);
    if (w.index == i) {
      lhs_at = lhs;
      rhs_at = rhs;
    }
  }
  CheckReport r = inequality_report("weyl_laplacian_einstein", metric, b, w, tol.resolve("weyl_laplacian_einstein"));
  r.details["lhs"] = lhs_at;
  r.details["rhs"] = rhs_at;
  r.details["max_abs_margin"] = max_abs_margin;
  r.details["C_n"] = cn;
  return r;
}

// ---- pinching predicates ----

namespace {

struct PredicateTally {
  std::size_t holds = 0;
  std::size_t equal = 0;
  std::size_t fails = 0;
  Worst worst;
  double lhs_min = std::numeric_limits<double>::infinity();
  double lhs_max = -std::numeric_limits<double>::infinity();
  double rhs_min = std::numeric_limits<double>::infinity();
  double rhs_max = -std::numeric_limits<double>::infinity();

  void add(double lhs, double rhs, double tol, std::size_t i) {
    const double margin = rhs - lhs;
    if (std::abs(margin) <= tol)
      ++equal;
    else if (margin > 0)
      ++holds;
    else
      ++fails;
    worst.min(margin, i);
    lhs_min = std::min(lhs_min, lhs);
    lhs_max = std::max(lhs_max, lhs);
    rhs_min = std::min(rhs_min, rhs);
    rhs_max = std::max(rhs_max, rhs);
  }

  // Non-strict predicates treat equality as holding.
  std::string verdict(std::size_t total, bool strict) const {
    const std::size_t bad = fails + (strict ? equal : 0);
    if (strict && equal == total) return "equality at all sampled points";
    if (bad == 0) return "holds at all sampled points";
    if (bad == total) return "fails at all sampled points";
    return "fails at " + std::to_string(bad) + " of " + std::to_string(total) + " sampled points";
  }

  void fill(CheckReport& r) const {
    r.details["lhs_min"] = lhs_min;
    r.details["lhs_max"] = lhs_max;
    r.details["rhs_min"] = rhs_min;
    r.details["rhs_max"] = rhs_max;
    r.details["points_holding"] = static_cast<double>(holds);
    r.details["points_equal"] = static_cast<double>(equal);
    r.details["points_failing"] = static_cast<double>(fails);
  }
};

bool bach_flat(Bundles b) {
  for (const auto& x : b)
    if (norm(bach_direct(x), x.metric) > 1e-6 * std::max(1.0, x.reference_scale)) return false;
  return true;
}

}  // namespace

CheckReport pinch_pointwise_thm11(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "pinch_thm11");
  const int n = b.front().dim;
  if (n < 4) return inapplicable("pinch_thm11", metric, CheckKind::predicate, b, "needs n >= 4");
  const ConstantsTable c = constants(n);
  const double t = tol.resolve("pinch_thm11");
  CheckReport r = base_report("pinch_thm11", metric, CheckKind::predicate, b);
  r.tolerance = t;

  std::size_t nonpositive = 0;
  for (const auto& x : b) nonpositive += x.scalar > kAbsoluteFloor ? 0 : 1;
  if (nonpositive > 0) {
    r.verdict = "degenerate";
    r.note = "scalar curvature is not positive at " + std::to_string(nonpositive) + " sampled points";
    r.details["scalar_min"] = std::min_element(b.begin(), b.end(), [](const auto& p, const auto& q) {
                                return p.scalar < q.scalar;
                              })->scalar;
    return r;
  }

  PredicateTally tally;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const double lhs = norm(pinching_tensor(x, c.lambda_pointwise), x.metric);
    const double rhs = x.scalar * c.pointwise_threshold;
    tally.add(lhs, rhs, t, i);
  }
  r.verdict = tally.verdict(b.size(), false);
  r.residual_or_margin = tally.worst.value;
  r.worst_point = b[tally.worst.index].point;
  tally.fill(r);

  // Rigidity consistency: holding everywhere on a Bach-flat metric with
  // positive constant R forces Einstein (and constant curvature for n = 4, 5).
  double dr = 0.0;
  const bool constant_r = constant_scalar(b, &dr);
  const bool flat = bach_flat(b);
  const bool einstein = max_traceless(b) <= kEinsteinGate;
  double wmax = 0.0;
  for (const auto& x : b) wmax = std::max(wmax, norm(x.weyl, x.metric));
  const bool hypotheses = constant_r && flat;
  const bool contradiction = hypotheses && tally.fails == 0 && (!einstein || ((n == 4 || n == 5) && wmax > kEinsteinGate));
  r.details["hypotheses_met"] = hypotheses ? 1.0 : 0.0;
  r.details["contradiction"] = contradiction ? 1.0 : 0.0;
  r.ok = !contradiction;
  if (contradiction) r.note = "condition holds on a Bach-flat constant-R sample that is not rigid";
  return r;
}

CheckReport pinch_einstein_pointwise(const std::string& metric, Bundles b, const Tolerances& tol) {
  require_full(b, "pinch_einstein_pointwise");
  const int n = b.front().dim;
  if (n < 4) return inapplicable("pinch_einstein_pointwise", metric, CheckKind::predicate, b, "needs n >= 4");
  const double cn = constants(n).c_n;
  const double t = tol.resolve("pinch_einstein_pointwise");
  CheckReport r = base_report("pinch_einstein_pointwise", metric, CheckKind::predicate, b);
  r.tolerance = t;
  PredicateTally tally;
  double wmax = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& x = b[i];
    const double wn = norm(x.weyl, x.metric);
    wmax = std::max(wmax, wn);
    tally.add(cn * wn, x.scalar / n, t, i);
  }
  r.verdict = tally.verdict(b.size(), true);
  r.residual_or_margin = tally.worst.value;
  r.worst_point = b[tally.worst.index].point;
  tally.fill(r);
  r.details["C_n"] = cn;

  // On an Einstein sample with R > 0 the strict condition forces W = 0.
  bool positive = true;
  for (const auto& x : b) positive = positive && x.scalar > kAbsoluteFloor;
  const bool einstein = max_traceless(b) <= kEinsteinGate;
  const bool contradiction = einstein && positive && tally.holds == b.size() && wmax > kEinsteinGate;
  r.details["contradiction"] = contradiction ? 1.0 : 0.0;
  r.ok = !contradiction;
  return r;
}

}  // namespace curvlab
