#include "curvlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curvlab/error.hpp"

namespace curvlab {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

std::size_t stride(int dim, int rank, int slot) { return ipow(dim, rank - 1 - slot); }

// t'_{..i..} = sum_j M_ij t_{..j..} on one slot.
Tensor apply_on_slot(const Tensor& t, int slot, const Tensor& mat, Variance new_variance) {
  auto variance = t.variance();
  variance[static_cast<std::size_t>(slot)] = new_variance;
  Tensor out(t.dim(), variance);
  const int n = t.dim();
  const std::size_t s = stride(n, t.rank(), slot);
  const std::size_t block = s * static_cast<std::size_t>(n);
  const auto src = t.data();
  auto dst = out.data();
  for (std::size_t outer_base = 0; outer_base < t.size(); outer_base += block) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double mij = mat.data()[static_cast<std::size_t>(i * n + j)];
        if (mij == 0.0) continue;
        const std::size_t di = outer_base + static_cast<std::size_t>(i) * s;
        const std::size_t sj = outer_base + static_cast<std::size_t>(j) * s;
        for (std::size_t inner = 0; inner < s; ++inner) dst[di + inner] += mij * src[sj + inner];
      }
    }
  }
  return out;
}

}  // namespace

Tensor::Tensor(int dim, int rank, Variance variance)
    : Tensor(dim, std::vector<Variance>(static_cast<std::size_t>(std::max(rank, 0)), variance)) {
  if (rank < 0) throw ShapeError("negative tensor rank");
}

Tensor::Tensor(int dim, std::vector<Variance> variance) : dim_(dim), variance_(std::move(variance)) {
  if (dim < 1) throw ShapeError("tensor dimension must be positive");
  if (rank() > kMaxRank) {
    throw ShapeError("tensor rank " + std::to_string(rank()) + " exceeds cap " +
                     std::to_string(kMaxRank));
  }
  data_.assign(ipow(dim, rank()), 0.0);
}

std::size_t Tensor::offset(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != rank()) throw ShapeError("index arity mismatch");
  std::size_t off = 0;
  for (int i : index) {
    if (i < 0 || i >= dim_) throw ShapeError("index out of range");
    off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return off;
}

std::array<int, kMaxRank> Tensor::unflatten(std::size_t flat) const {
  std::array<int, kMaxRank> idx{};
  for (int s = rank() - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % static_cast<std::size_t>(dim_));
    flat /= static_cast<std::size_t>(dim_);
  }
  return idx;
}

void Tensor::require_same_shape(const Tensor& other) const {
  if (dim_ != other.dim_ || variance_ != other.variance_) {
    throw ShapeError("tensor shape mismatch");
  }
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

MetricAtPoint MetricAtPoint::from_components(const Tensor& g) {
  if (g.rank() != 2) throw ShapeError("metric must have rank 2");
  const int n = g.dim();
  double scale = g.max_abs();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(g({i, j}) - g({j, i})) > 1e-12 * std::max(scale, 1e-300)) {
        throw GeometryError("metric is not symmetric");
      }
    }
  }
  // Cholesky pivots are ratios of consecutive leading principal minors, so
  // positive pivots are equivalent to positive minors.
  Tensor L(n, 2);
  for (int j = 0; j < n; ++j) {
    double d = g({j, j});
    for (int k = 0; k < j; ++k) d -= L({j, k}) * L({j, k});
    if (!(d > 0.0)) {
      throw GeometryError("metric is not positive definite (leading minor " +
                          std::to_string(j + 1) + ")");
    }
    const double ljj = std::sqrt(d);
    L({j, j}) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double v = g({i, j});
      for (int k = 0; k < j; ++k) v -= L({i, k}) * L({j, k});
      L({i, j}) = v / ljj;
    }
  }
  // Invert L, then g^{-1} = L^{-T} L^{-1}.
  Tensor Linv(n, 2);
  for (int i = 0; i < n; ++i) {
    Linv({i, i}) = 1.0 / L({i, i});
    for (int j = 0; j < i; ++j) {
      double v = 0.0;
      for (int k = j; k < i; ++k) v -= L({i, k}) * Linv({k, j});
      Linv({i, j}) = v / L({i, i});
    }
  }
  MetricAtPoint m;
  m.g_ = Tensor(n, 2);
  m.g_inv_ = Tensor(n, 2, Variance::contravariant);
  m.sqrt_det_ = 1.0;
  for (int i = 0; i < n; ++i) m.sqrt_det_ *= L({i, i});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.g_({i, j}) = 0.5 * (g({i, j}) + g({j, i}));
      double v = 0.0;
      for (int k = std::max(i, j); k < n; ++k) v += Linv({k, i}) * Linv({k, j});
      m.g_inv_({i, j}) = v;
    }
  }
  m.chol_ = std::move(L);
  return m;
}

Tensor contract(const Tensor& t, int slot_a, int slot_b, const MetricAtPoint& m) {
  const int r = t.rank();
  if (slot_a < 0 || slot_a >= r || slot_b < 0 || slot_b >= r) {
    throw ShapeError("contraction slot out of range");
  }
  if (slot_a == slot_b) throw ShapeError("contraction slots must be distinct");
  if (t.dim() != m.dim()) throw ShapeError("metric dimension mismatch");
  if (slot_a > slot_b) std::swap(slot_a, slot_b);
  const int n = t.dim();

  const Variance va = t.variance()[static_cast<std::size_t>(slot_a)];
  const Variance vb = t.variance()[static_cast<std::size_t>(slot_b)];
  Tensor pairing(n, 2);
  if (va == vb) {
    pairing = va == Variance::covariant ? m.g_inv() : m.g();
  } else {
    for (int i = 0; i < n; ++i) pairing.data()[static_cast<std::size_t>(i * n + i)] = 1.0;
  }

  std::vector<Variance> variance;
  for (int s = 0; s < r; ++s) {
    if (s != slot_a && s != slot_b) variance.push_back(t.variance()[static_cast<std::size_t>(s)]);
  }
  Tensor out(n, variance);
  const std::size_t sa = stride(n, r, slot_a);
  const std::size_t sb = stride(n, r, slot_b);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    // Rebuild the base offset in t with zeros in the contracted slots.
    const auto idx = out.unflatten(flat);
    std::size_t base = 0;
    int k = 0;
    for (int s = 0; s < r; ++s) {
      const int v = (s == slot_a || s == slot_b) ? 0 : idx[static_cast<std::size_t>(k++)];
      base = base * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    }
    double acc = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        const double w = pairing.data()[static_cast<std::size_t>(p * n + q)];
        if (w == 0.0) continue;
        acc += w * t.data()[base + static_cast<std::size_t>(p) * sa + static_cast<std::size_t>(q) * sb];
      }
    }
    out.data()[flat] = acc;
  }
  return out;
}

Tensor raise(const Tensor& t, int slot, const MetricAtPoint& m) {
  if (t.variance().at(static_cast<std::size_t>(slot)) == Variance::contravariant) return t;
  return apply_on_slot(t, slot, m.g_inv(), Variance::contravariant);
}

Tensor lower(const Tensor& t, int slot, const MetricAtPoint& m) {
  if (t.variance().at(static_cast<std::size_t>(slot)) == Variance::covariant) return t;
  return apply_on_slot(t, slot, m.g(), Variance::covariant);
}

Tensor raise_all(const Tensor& t, const MetricAtPoint& m) {
  Tensor out = t;
  for (int s = 0; s < t.rank(); ++s) out = raise(out, s, m);
  return out;
}

double inner(const Tensor& a, const Tensor& b, const MetricAtPoint& m) {
  if (a.dim() != b.dim() || a.variance() != b.variance()) {
    throw ShapeError("inner product of tensors with different shapes");
  }
  if (a.dim() != m.dim()) throw ShapeError("metric dimension mismatch");
  Tensor dual = b;
  for (int s = 0; s < b.rank(); ++s) {
    dual = b.variance()[static_cast<std::size_t>(s)] == Variance::covariant ? raise(dual, s, m)
                                                                             : lower(dual, s, m);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a.data()[k] * dual.data()[k];
  return acc;
}

double norm2(const Tensor& a, const MetricAtPoint& m) { return std::max(0.0, inner(a, a, m)); }

double norm(const Tensor& a, const MetricAtPoint& m) { return std::sqrt(norm2(a, m)); }

Tensor kulkarni_nomizu(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim() != b.dim()) {
    throw ShapeError("Kulkarni-Nomizu product needs two rank-2 tensors of equal dimension");
  }
  const int n = a.dim();
  Tensor out(n, 4);
  auto A = [&](int i, int j) { return a.data()[static_cast<std::size_t>(i * n + j)]; };
  auto B = [&](int i, int j) { return b.data()[static_cast<std::size_t>(i * n + j)]; };
  std::size_t k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          out.data()[k++] = A(i, p) * B(j, q) - A(i, q) * B(j, p) + B(i, p) * A(j, q) -
                            A(j, p) * B(i, q);
  return out;
}

Tensor traceless_part(const Tensor& s, const MetricAtPoint& m) {
  if (s.rank() != 2) throw ShapeError("traceless_part needs a rank-2 tensor");
  const double trace = contract(s, 0, 1, m).data()[0];
  Tensor out = s;
  out -= m.g() * (trace / static_cast<double>(s.dim()));
  return out;
}

Tensor outer(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim()) throw ShapeError("outer product dimension mismatch");
  auto variance = a.variance();
  variance.insert(variance.end(), b.variance().begin(), b.variance().end());
  Tensor out(a.dim(), variance);
  std::size_t k = 0;
  for (double x : a.data())
    for (double y : b.data()) out.data()[k++] = x * y;
  return out;
}

Tensor permute(const Tensor& t, std::span<const int> perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r) throw ShapeError("permutation arity mismatch");
  std::vector<Variance> variance(static_cast<std::size_t>(r));
  std::vector<std::size_t> src_stride(static_cast<std::size_t>(r));
  for (int s = 0; s < r; ++s) {
    const int p = perm[static_cast<std::size_t>(s)];
    if (p < 0 || p >= r) throw ShapeError("permutation entry out of range");
    variance[static_cast<std::size_t>(s)] = t.variance()[static_cast<std::size_t>(p)];
    src_stride[static_cast<std::size_t>(s)] = stride(t.dim(), r, p);
  }
  Tensor out(t.dim(), variance);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto idx = out.unflatten(flat);
    std::size_t src = 0;
    for (int s = 0; s < r; ++s) {
      src += static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]) * src_stride[static_cast<std::size_t>(s)];
    }
    out.data()[flat] = t.data()[src];
  }
  return out;
}

double symmetry_defect(const Tensor& t, std::span<const int> perm, double sign) {
  const Tensor p = permute(t, perm);
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    worst = std::max(worst, std::abs(t.data()[k] - sign * p.data()[k]));
  }
  return worst;
}

Tensor identity_tensor(int dim) {
  Tensor out(dim, std::vector<Variance>{Variance::contravariant, Variance::covariant});
  for (int i = 0; i < dim; ++i) out.data()[static_cast<std::size_t>(i * dim + i)] = 1.0;
  return out;
}

}  // namespace curvlab
