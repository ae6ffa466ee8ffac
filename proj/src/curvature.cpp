#include "curvlab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "curvlab/error.hpp"
#include "curvlab/expr.hpp"

namespace curvlab {

namespace {

std::size_t ipow(int n, int r) {
  std::size_t out = 1;
  for (int k = 0; k < r; ++k) out *= static_cast<std::size_t>(n);
  return out;
}

// Multi-index of a flat offset, last slot fastest.
void unflatten(std::size_t flat, int dim, int rank, int* idx) {
  for (int s = rank - 1; s >= 0; --s) {
    idx[s] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
}

std::size_t flatten(const int* idx, int dim, int rank) {
  std::size_t flat = 0;
  for (int s = 0; s < rank; ++s) flat = flat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx[s]);
  return flat;
}

JetTensor truncate_to(const JetTensor& t, int order) {
  return t.order() == order ? t : t.truncated(order);
}

// (a o b) for symmetric 2-tensors of jets.
JetTensor kulkarni_nomizu_jets(const JetTensor& a, const JetTensor& b) {
  const int n = a.dim();
  JetTensor out(n, 4, a.order());
  auto A = [&](int i, int j) -> const Jet& { return a[static_cast<std::size_t>(i * n + j)]; };
  auto B = [&](int i, int j) -> const Jet& { return b[static_cast<std::size_t>(i * n + j)]; };
  int idx[4];
  for (std::size_t f = 0; f < out.size(); ++f) {
    unflatten(f, n, 4, idx);
    const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    if (i == j || k == l) continue;
    Jet& o = out[f];
    o.add_product(A(i, k), B(j, l));
    o.add_product(A(i, l), B(j, k), -1.0);
    o.add_product(B(i, k), A(j, l));
    o.add_product(A(j, k), B(i, l), -1.0);
  }
  return out;
}

// Raise every covariant slot of t with g_inv.
JetTensor raise_all_jets(const JetTensor& t, const JetTensor& g_inv) {
  const int n = t.dim();
  const int r = t.rank();
  JetTensor ginv = truncate_to(g_inv, t.order());
  JetTensor cur = t;
  int idx[kMaxRank];
  for (int s = 0; s < r; ++s) {
    if (cur.variance()[static_cast<std::size_t>(s)] == Variance::contravariant) continue;
    std::vector<Variance> var = cur.variance();
    var[static_cast<std::size_t>(s)] = Variance::contravariant;
    JetTensor next(n, var, t.order());
    for (std::size_t f = 0; f < next.size(); ++f) {
      unflatten(f, n, r, idx);
      const int a = idx[s];
      for (int p = 0; p < n; ++p) {
        idx[s] = p;
        next[f].add_product(ginv[static_cast<std::size_t>(a * n + p)], cur[flatten(idx, n, r)]);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

// Gradient of |t| from the jet of |t|^2; zero where |t| <= floor.
Tensor grad_norm(const JetTensor& t, const JetTensor& g_inv, double floor) {
  const int n = t.dim();
  JetTensor t1 = truncate_to(t, 1);
  JetTensor up = raise_all_jets(t1, g_inv);
  Jet sq(n, 1);
  for (std::size_t f = 0; f < t1.size(); ++f) sq.add_product(t1[f], up[f]);
  Tensor out(n, 1);
  if (!(sq.value() > floor * floor)) return out;
  Jet nrm = sqrt(sq);
  const auto g = nrm.gradient();
  for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] = g[static_cast<std::size_t>(c)];
  return out;
}

constexpr double kNormFloor = 1e-10;

}  // namespace

// ---- JetTensor ----

JetTensor::JetTensor(int dim, std::vector<Variance> variance, int order)
    : dim_(dim), variance_(std::move(variance)), order_(order) {
  if (static_cast<int>(variance_.size()) > kMaxRank) {
    throw ShapeError("jet tensor rank " + std::to_string(variance_.size()) + " exceeds cap " +
                     std::to_string(kMaxRank));
  }
  comps_.assign(ipow(dim, static_cast<int>(variance_.size())), Jet(dim, order));
}

Jet& JetTensor::at(std::initializer_list<int> index) {
  return const_cast<Jet&>(std::as_const(*this).at(index));
}

const Jet& JetTensor::at(std::initializer_list<int> index) const {
  if (static_cast<int>(index.size()) != rank()) throw ShapeError("index arity does not match rank");
  std::size_t flat = 0;
  for (int i : index) {
    if (i < 0 || i >= dim_) throw ShapeError("index out of range");
    flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return comps_[flat];
}

Tensor JetTensor::value() const {
  Tensor out(dim_, variance_);
  for (std::size_t f = 0; f < comps_.size(); ++f) out[f] = comps_[f].value();
  return out;
}

JetTensor JetTensor::truncated(int order) const {
  JetTensor out(dim_, variance_, order);
  for (std::size_t f = 0; f < comps_.size(); ++f) out.comps_[f] = comps_[f].truncated(order);
  return out;
}

// ---- metric ----

MetricJets metric_jets(const MetricSpec& spec, std::span<const double> point, int order) {
  const int n = spec.dim();
  if (static_cast<int>(point.size()) != n) throw ShapeError("point dimension does not match metric");
  if (!spec.contains(point)) throw GeometryError("point outside chart domain of " + spec.name());

  JetTensor g(n, 2, order);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Jet v = eval_jet(spec.component(i, j), point, spec.parameters(), order);
      g[static_cast<std::size_t>(j * n + i)] = v;
      g[static_cast<std::size_t>(i * n + j)] = std::move(v);
    }
  }
  const MetricAtPoint m = MetricAtPoint::from_components(g.value());
  const Tensor& A = m.g_inv();

  // (g0 + h)^{-1} = A sum_k (-h A)^k; h has no constant term, so the series
  // terminates at k = order.
  const auto nn = static_cast<std::size_t>(n);
  JetTensor N(n, 2, order);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      Jet& out = N[i * nn + j];
      for (std::size_t k = 0; k < nn; ++k) {
        Jet h = g[i * nn + k];
        h.coefficients()[0] = 0.0;
        out += h * (-A[k * nn + j]);
      }
    }
  }
  auto identity_plus = [&](JetTensor& s) {
    for (std::size_t i = 0; i < nn; ++i) s[i * nn + i] += 1.0;
  };
  JetTensor S(n, 2, order);
  identity_plus(S);
  for (int it = 0; it < order; ++it) {
    JetTensor next(n, 2, order);
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nn; ++j)
        for (std::size_t k = 0; k < nn; ++k) next[i * nn + j].add_product(N[i * nn + k], S[k * nn + j]);
    identity_plus(next);
    S = std::move(next);
  }
  JetTensor g_inv(n, {Variance::contravariant, Variance::contravariant}, order);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k) g_inv[i * nn + j] += S[k * nn + j] * A[i * nn + k];
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = i + 1; j < nn; ++j) {
      Jet avg = (g_inv[i * nn + j] + g_inv[j * nn + i]) * 0.5;
      g_inv[j * nn + i] = avg;
      g_inv[i * nn + j] = std::move(avg);
    }
  }
  return MetricJets{std::move(g), std::move(g_inv)};
}

JetTensor christoffel(const MetricJets& metric) {
  const int n = metric.g.dim();
  const int m = metric.g.order();
  if (m < 1) throw ShapeError("christoffel symbols need metric jets of order >= 1");
  const auto nn = static_cast<std::size_t>(n);
  // dg[(i*n + j)*n + l] = d_l g_ij
  std::vector<Jet> dg;
  dg.reserve(nn * nn * nn);
  for (std::size_t ij = 0; ij < nn * nn; ++ij)
    for (int l = 0; l < n; ++l) dg.push_back(metric.g[ij].derivative(l));
  auto d = [&](std::size_t i, std::size_t j, std::size_t l) -> const Jet& { return dg[(i * nn + j) * nn + l]; };

  const JetTensor ginv = metric.g_inv.truncated(m - 1);
  JetTensor gamma(n, {Variance::contravariant, Variance::covariant, Variance::covariant}, m - 1);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = i; j < nn; ++j) {
      for (std::size_t l = 0; l < nn; ++l) {
        Jet first = (d(j, l, i) + d(i, l, j) - d(i, j, l)) * 0.5;
        for (std::size_t k = 0; k < nn; ++k) gamma[(k * nn + i) * nn + j].add_product(ginv[k * nn + l], first);
      }
      if (j != i)
        for (std::size_t k = 0; k < nn; ++k) gamma[(k * nn + j) * nn + i] = gamma[(k * nn + i) * nn + j];
    }
  }
  return gamma;
}

JetTensor riemann(const MetricJets& metric, const JetTensor& gamma) {
  const int n = gamma.dim();
  const int k = gamma.order();
  if (k < 1) throw ShapeError("riemann tensor needs christoffel jets of order >= 1");
  const auto nn = static_cast<std::size_t>(n);
  const int o = k - 1;
  const JetTensor G = gamma.truncated(o);
  auto Gam = [&](std::size_t a, std::size_t b, std::size_t c) -> const Jet& { return G[(a * nn + b) * nn + c]; };
  // dG[((a*n + b)*n + c)*n + v] = d_v Gamma^a_bc
  std::vector<Jet> dG;
  dG.reserve(nn * nn * nn * nn);
  for (std::size_t f = 0; f < gamma.size(); ++f)
    for (int v = 0; v < n; ++v) dG.push_back(gamma[f].derivative(v));
  auto dGam = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t v) -> const Jet& {
    return dG[((a * nn + b) * nn + c) * nn + v];
  };

  // Mixed R^a_bcd, antisymmetric in (c, d).
  JetTensor mixed(n, {Variance::contravariant, Variance::covariant, Variance::covariant, Variance::covariant}, o);
  for (std::size_t a = 0; a < nn; ++a) {
    for (std::size_t b = 0; b < nn; ++b) {
      for (std::size_t c = 0; c < nn; ++c) {
        for (std::size_t d = c + 1; d < nn; ++d) {
          Jet& r = mixed[((a * nn + b) * nn + c) * nn + d];
          r += dGam(a, d, b, c);
          r -= dGam(a, c, b, d);
          for (std::size_t e = 0; e < nn; ++e) {
            r.add_product(Gam(a, c, e), Gam(e, d, b));
            r.add_product(Gam(a, d, e), Gam(e, c, b), -1.0);
          }
          mixed[((a * nn + b) * nn + d) * nn + c] = -r;
        }
      }
    }
  }
  const JetTensor g = metric.g.truncated(o);
  JetTensor riem(n, 4, o);
  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t bcd = 0; bcd < nn * nn * nn; ++bcd)
      for (std::size_t f = 0; f < nn; ++f) riem[a * nn * nn * nn + bcd].add_product(g[a * nn + f], mixed[f * nn * nn * nn + bcd]);
  return riem;
}

RicciJets ricci_scalar(const JetTensor& riem, const MetricJets& metric) {
  const int n = riem.dim();
  const int o = riem.order();
  const auto nn = static_cast<std::size_t>(n);
  const JetTensor ginv = metric.g_inv.truncated(o);
  const JetTensor g = metric.g.truncated(o);
  JetTensor ric(n, 2, o);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t kk = 0; kk < nn; ++kk)
      for (std::size_t j = 0; j < nn; ++j)
        for (std::size_t l = 0; l < nn; ++l)
          ric[i * nn + kk].add_product(ginv[j * nn + l], riem[((i * nn + j) * nn + kk) * nn + l]);
  Jet scalar(n, o);
  for (std::size_t f = 0; f < nn * nn; ++f) scalar.add_product(ginv[f], ric[f]);
  JetTensor traceless = ric;
  for (std::size_t f = 0; f < nn * nn; ++f) traceless[f].add_product(scalar, g[f], -1.0 / n);
  return RicciJets{std::move(ric), std::move(scalar), std::move(traceless)};
}

JetTensor weyl(const JetTensor& riem, const RicciJets& ricci, const MetricJets& metric) {
  const int n = riem.dim();
  const int o = riem.order();
  if (n < 3) return JetTensor(n, 4, o);
  const JetTensor g = metric.g.truncated(o);
  const JetTensor ric_g = kulkarni_nomizu_jets(ricci.ricci, g);
  const JetTensor g_g = kulkarni_nomizu_jets(g, g);
  const double c1 = 1.0 / (n - 2);
  const double c2 = 1.0 / (2.0 * (n - 1) * (n - 2));
  JetTensor w = riem;
  for (std::size_t f = 0; f < w.size(); ++f) {
    w[f] += ric_g[f] * (-c1);
    w[f].add_product(ricci.scalar, g_g[f], c2);
  }
  return w;
}

Tensor weyl_traceless_form(const Tensor& riem, const Tensor& traceless_ricci, double scalar,
                           const MetricAtPoint& m) {
  const int n = riem.dim();
  if (n < 3) return Tensor(n, 4);
  Tensor w = riem;
  w -= (1.0 / (n - 2)) * kulkarni_nomizu(traceless_ricci, m.g());
  w -= (scalar / (2.0 * n * (n - 1))) * kulkarni_nomizu(m.g(), m.g());
  return w;
}

// ---- covariant derivatives ----

namespace {

JetTensor covariant_derivative_once(const JetTensor& t, const JetTensor& gamma) {
  const int n = t.dim();
  const int r = t.rank();
  const int o = t.order() - 1;
  const auto nn = static_cast<std::size_t>(n);
  const JetTensor G = gamma.truncated(o);
  auto Gam = [&](int a, int b, int c) -> const Jet& {
    return G[(static_cast<std::size_t>(a) * nn + static_cast<std::size_t>(b)) * nn + static_cast<std::size_t>(c)];
  };
  std::vector<Variance> var = t.variance();
  var.push_back(Variance::covariant);
  JetTensor out(n, var, o);
  std::vector<Jet> trunc;
  trunc.reserve(t.size());
  for (std::size_t f = 0; f < t.size(); ++f) trunc.push_back(t[f].truncated(o));

  int idx[kMaxRank + 1];
  for (std::size_t f = 0; f < out.size(); ++f) {
    unflatten(f, n, r + 1, idx);
    const int c = idx[r];
    Jet& res = out[f];
    res = t[flatten(idx, n, r)].derivative(c);
    for (int s = 0; s < r; ++s) {
      const int is = idx[s];
      const bool up = t.variance()[static_cast<std::size_t>(s)] == Variance::contravariant;
      for (int p = 0; p < n; ++p) {
        idx[s] = p;
        const Jet& tp = trunc[flatten(idx, n, r)];
        if (up)
          res.add_product(Gam(is, c, p), tp);
        else
          res.add_product(Gam(p, c, is), tp, -1.0);
      }
      idx[s] = is;
    }
  }
  return out;
}

}  // namespace

JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma, int order) {
  if (order < 1 || order > 2) throw ShapeError("covariant derivative order must be 1 or 2");
  if (t.rank() + order > kMaxRank) {
    throw ShapeError("covariant derivative of a rank " + std::to_string(t.rank()) + " tensor to order " +
                     std::to_string(order) + " exceeds rank cap " + std::to_string(kMaxRank));
  }
  if (t.order() < order) throw ShapeError("tensor jets too shallow for requested covariant derivative");
  if (gamma.order() < t.order() - 1) throw ShapeError("christoffel jets too shallow for covariant derivative");
  JetTensor out = covariant_derivative_once(t, gamma);
  if (order == 2) out = covariant_derivative_once(out, gamma);
  return out;
}

JetTensor cotton(const JetTensor& grad_ricci, const Jet& scalar, const JetTensor& g_full) {
  const int n = grad_ricci.dim();
  const int o = grad_ricci.order();
  if (scalar.order() < o + 1) throw ShapeError("scalar curvature jet too shallow for cotton tensor");
  const auto nn = static_cast<std::size_t>(n);
  const JetTensor g = g_full.truncated(o);
  std::vector<Jet> dR;
  for (int i = 0; i < n; ++i) dR.push_back(scalar.derivative(i).truncated(o));
  const double c = 1.0 / (2.0 * (n - 1));
  JetTensor out(n, 3, o);
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      for (std::size_t k = 0; k < nn; ++k) {
        Jet& r = out[(i * nn + j) * nn + k];
        r += grad_ricci[(k * nn + j) * nn + i];
        r -= grad_ricci[(k * nn + i) * nn + j];
        r.add_product(dR[i], g[j * nn + k], -c);
        r.add_product(dR[j], g[i * nn + k], c);
      }
    }
  }
  return out;
}

// ---- bundle ----

CurvatureBundle curvature_bundle(const MetricSpec& spec, std::span<const double> point, CurvatureLevel level) {
  const int n = spec.dim();
  const int m = level == CurvatureLevel::full ? kMaxJetOrder : 2;
  const MetricJets mj = metric_jets(spec, point, m);
  const JetTensor gamma = christoffel(mj);
  const JetTensor riem = riemann(mj, gamma);
  const RicciJets ric = ricci_scalar(riem, mj);
  const JetTensor w = weyl(riem, ric, mj);

  CurvatureBundle b;
  b.dim = n;
  b.level = level;
  b.point.assign(point.begin(), point.end());
  b.metric = MetricAtPoint::from_components(mj.g.value());
  b.christoffel = gamma.value();
  b.riemann = riem.value();
  b.ricci = ric.ricci.value();
  b.scalar = ric.scalar.value();
  b.traceless_ricci = ric.traceless.value();
  b.weyl = w.value();
  b.weyl_alt = weyl_traceless_form(b.riemann, b.traceless_ricci, b.scalar, b.metric);
  b.reference_scale = norm(b.riemann, b.metric);

  if (level != CurvatureLevel::full) return b;

  b.grad_metric = covariant_derivative(mj.g.truncated(1), gamma).value();

  JetTensor dR(n, 1, ric.scalar.order() - 1);
  for (int i = 0; i < n; ++i) dR[static_cast<std::size_t>(i)] = ric.scalar.derivative(i);
  b.grad_scalar = dR.value();
  b.hess_scalar = covariant_derivative(dR.truncated(1), gamma).value();

  const JetTensor gric = covariant_derivative(ric.ricci, gamma);
  b.grad_ricci = gric.value();

  const JetTensor gtr = covariant_derivative(ric.traceless, gamma);
  b.grad_traceless_ricci = gtr.value();
  b.hess_traceless_ricci = covariant_derivative(gtr, gamma).value();

  const JetTensor gw = covariant_derivative(w, gamma);
  b.grad_weyl = gw.value();
  b.hess_weyl = covariant_derivative(gw, gamma).value();

  const JetTensor cot = cotton(gric, ric.scalar, mj.g);
  b.cotton = cot.value();
  b.grad_cotton = covariant_derivative(cot, gamma).value();

  // Traceless-Ricci form of the Cotton tensor.
  {
    const auto nn = static_cast<std::size_t>(n);
    const Tensor& g = b.metric.g();
    const double c = (n - 2.0) / (2.0 * n * (n - 1.0));
    Tensor alt(n, 3);
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nn; ++j)
        for (std::size_t k = 0; k < nn; ++k)
          alt[(i * nn + j) * nn + k] = b.grad_traceless_ricci[(k * nn + j) * nn + i] -
                                       b.grad_traceless_ricci[(k * nn + i) * nn + j] +
                                       c * (b.grad_scalar[i] * g[j * nn + k] - b.grad_scalar[j] * g[i * nn + k]);
    b.cotton_alt = std::move(alt);
  }

  b.reference_scale += norm(b.grad_ricci, b.metric) + norm(b.grad_weyl, b.metric) + norm(b.hess_weyl, b.metric);
  b.grad_norm_traceless_ricci = grad_norm(ric.traceless, mj.g_inv, kNormFloor);
  b.grad_norm_weyl = grad_norm(w, mj.g_inv, kNormFloor);
  return b;
}

namespace {

void require_full(const CurvatureBundle& b, const char* what) {
  if (b.level != CurvatureLevel::full) throw Error(std::string(what) + " needs a full curvature bundle");
}

Tensor weyl_ricci_term(const CurvatureBundle& b) {
  const int n = b.dim;
  const auto nn = static_cast<std::size_t>(n);
  const Tensor rup = raise_all(b.ricci, b.metric);
  Tensor out(n, 2);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < nn; ++k)
        for (std::size_t l = 0; l < nn; ++l) s += b.weyl[((i * nn + k) * nn + j) * nn + l] * rup[k * nn + l];
      out[i * nn + j] = s;
    }
  return out;
}

}  // namespace

Tensor bach_direct(const CurvatureBundle& b) {
  require_full(b, "bach_direct");
  const int n = b.dim;
  if (n < 4) throw Error("bach_direct requires n >= 4 (division by n - 3)");
  // hess_weyl[i,k,j,l,a,b] = nabla_b nabla_a W_ikjl; contract (l,a) then (k,b).
  const Tensor div2 = contract(contract(b.hess_weyl, 3, 4, b.metric), 1, 3, b.metric);
  return (1.0 / (n - 3)) * div2 + (1.0 / (n - 2)) * weyl_ricci_term(b);
}

Tensor bach_cotton_form(const CurvatureBundle& b) {
  require_full(b, "bach_cotton_form");
  const int n = b.dim;
  if (n < 4) throw Error("bach_cotton_form requires n >= 4");
  const Tensor divc = contract(b.grad_cotton, 0, 3, b.metric);
  return (1.0 / (n - 2)) * (divc + weyl_ricci_term(b));
}

Tensor weyl_divergence(const CurvatureBundle& b) {
  require_full(b, "weyl_divergence");
  return contract(b.grad_weyl, 3, 4, b.metric);
}

Tensor weyl_laplacian(const CurvatureBundle& b) {
  require_full(b, "weyl_laplacian");
  return contract(b.hess_weyl, 4, 5, b.metric);
}

Tensor traceless_ricci_laplacian(const CurvatureBundle& b) {
  require_full(b, "traceless_ricci_laplacian");
  return contract(b.hess_traceless_ricci, 2, 3, b.metric);
}

}  // namespace curvlab
