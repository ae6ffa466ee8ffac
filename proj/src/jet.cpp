#include "curvlab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>
#include <utility>

#include "curvlab/error.hpp"

namespace curvlab {

namespace {

std::uint64_t pack(const MultiIndex& alpha) {
  std::uint64_t key = 0;
  for (int i = 0; i < kMaxJetDim; ++i) {
    key |= static_cast<std::uint64_t>(alpha[static_cast<std::size_t>(i)]) << (8 * i);
  }
  return key;
}

// Appends all multi-indices of total degree `degree` in graded-lex order.
void enumerate_degree(int dim, int degree, int var, MultiIndex& current,
                      std::vector<MultiIndex>& out) {
  if (var == dim - 1) {
    current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(degree);
    out.push_back(current);
    current[static_cast<std::size_t>(var)] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
    enumerate_degree(dim, degree - e, var + 1, current, out);
  }
  current[static_cast<std::size_t>(var)] = 0;
}

struct TableCache {
  std::mutex mutex;
  std::map<std::pair<int, int>, std::unique_ptr<MultiIndexTable>> tables;
};

TableCache& table_cache() {
  static TableCache cache;
  return cache;
}

}  // namespace

std::size_t MultiIndexTable::table_size(int dim, int order) {
  // C(dim + order, order)
  std::size_t result = 1;
  for (int k = 1; k <= order; ++k) {
    result = result * static_cast<std::size_t>(dim + k) / static_cast<std::size_t>(k);
  }
  return result;
}

MultiIndexTable::MultiIndexTable(int dim, int order) : dim_(dim), order_(order) {
  MultiIndex current{};
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(dim, d, 0, current, indices_);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> lookup;
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    lookup.emplace(pack(indices_[k]), static_cast<std::uint32_t>(k));
    int deg = 0;
    double fact = 1.0;
    for (int i = 0; i < dim; ++i) {
      const int e = indices_[k][static_cast<std::size_t>(i)];
      deg += e;
      for (int f = 2; f <= e; ++f) fact *= f;
    }
    degrees_.push_back(deg);
    factorials_.push_back(fact);
  }

  for (std::size_t a = 0; a < indices_.size(); ++a) {
    for (std::size_t b = 0; b < indices_.size(); ++b) {
      if (degrees_[a] + degrees_[b] > order) continue;
      MultiIndex sum{};
      for (int i = 0; i < dim; ++i) {
        const auto s = static_cast<std::size_t>(i);
        sum[s] = static_cast<std::uint8_t>(indices_[a][s] + indices_[b][s]);
      }
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           lookup.at(pack(sum))});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [](const ProductTerm& x, const ProductTerm& y) { return x.out < y.out; });

  derivatives_.resize(static_cast<std::size_t>(dim));
  if (order >= 1) {
    const std::size_t lower = table_size(dim, order - 1);
    for (int v = 0; v < dim; ++v) {
      const auto sv = static_cast<std::size_t>(v);
      for (std::size_t dst = 0; dst < lower; ++dst) {
        MultiIndex up = indices_[dst];
        up[sv] = static_cast<std::uint8_t>(up[sv] + 1);
        derivatives_[sv].push_back({lookup.at(pack(up)), static_cast<std::uint32_t>(dst),
                                    static_cast<double>(up[sv])});
      }
    }
  }
}

const MultiIndexTable& MultiIndexTable::get(int dim, int order) {
  if (dim < 1 || dim > kMaxJetDim) {
    throw ShapeError("jet dimension must lie in [1, " + std::to_string(kMaxJetDim) +
                     "], got " + std::to_string(dim));
  }
  if (order < 0 || order > kMaxJetOrder) {
    throw ShapeError("jet order must lie in [0, " + std::to_string(kMaxJetOrder) +
                     "], got " + std::to_string(order));
  }
  auto& cache = table_cache();
  std::lock_guard lock(cache.mutex);
  auto& slot = cache.tables[{dim, order}];
  if (!slot) slot.reset(new MultiIndexTable(dim, order));
  return *slot;
}

std::size_t MultiIndexTable::position(const MultiIndex& alpha) const {
  int deg = 0;
  for (int i = 0; i < kMaxJetDim; ++i) {
    if (i >= dim_ && alpha[static_cast<std::size_t>(i)] != 0) {
      throw ShapeError("multi-index has entries beyond the jet dimension");
    }
    deg += alpha[static_cast<std::size_t>(i)];
  }
  if (deg > order_) {
    throw ShapeError("multi-index of degree " + std::to_string(deg) +
                     " exceeds jet order " + std::to_string(order_));
  }
  // Tables are small; a linear scan over the degree block is sufficient.
  const std::size_t begin = deg == 0 ? 0 : table_size(dim_, deg - 1);
  const std::size_t end = table_size(dim_, deg);
  for (std::size_t k = begin; k < end; ++k) {
    if (indices_[k] == alpha) return k;
  }
  throw ShapeError("multi-index not found");
}

Jet::Jet(int dim, int order)
    : table_(&MultiIndexTable::get(dim, order)), coeffs_(table_->size(), 0.0) {}

Jet Jet::constant(int dim, int order, double value) {
  Jet j(dim, order);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(int dim, int order, int var, double value) {
  if (var < 0 || var >= dim) throw ShapeError("variable index out of range");
  Jet j(dim, order);
  j.coeffs_[0] = value;
  if (order >= 1) j.coeffs_[1 + static_cast<std::size_t>(var)] = 1.0;
  return j;
}

double Jet::coefficient(const MultiIndex& alpha) const {
  return coeffs_[table_->position(alpha)];
}

double Jet::partial(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim()) {
    throw ShapeError("multi-index length does not match jet dimension");
  }
  MultiIndex mi{};
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0) throw ShapeError("negative multi-index entry");
    if (alpha[i] > order()) {
      throw ShapeError("partial derivative order exceeds jet order");
    }
    mi[i] = static_cast<std::uint8_t>(alpha[i]);
  }
  const std::size_t k = table_->position(mi);
  return coeffs_[k] * table_->factorial(k);
}

Jet Jet::derivative(int var) const {
  if (order() < 1) throw ShapeError("cannot differentiate an order-0 jet");
  if (var < 0 || var >= dim()) throw ShapeError("variable index out of range");
  Jet out(dim(), order() - 1);
  for (const auto& t : table_->derivative(var)) {
    out.coeffs_[t.dst] = t.factor * coeffs_[t.src];
  }
  return out;
}

std::vector<double> Jet::gradient() const {
  if (order() < 1) throw ShapeError("gradient needs a jet of order >= 1");
  return {coeffs_.begin() + 1, coeffs_.begin() + 1 + dim()};
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order()) throw ShapeError("cannot raise jet order by truncation");
  Jet out(dim(), new_order);
  std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
  return out;
}

void Jet::require_same_shape(const Jet& other) const {
  if (table_ != other.table_) {
    throw ShapeError("jet shape mismatch: (n=" + std::to_string(dim()) + ", m=" +
                     std::to_string(order()) + ") vs (n=" + std::to_string(other.dim()) +
                     ", m=" + std::to_string(other.order()) + ")");
  }
}

Jet& Jet::operator+=(const Jet& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_same_shape(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

void Jet::add_product(const Jet& a, const Jet& b, double scale) {
  require_same_shape(a);
  require_same_shape(b);
  const double* pa = a.coeffs_.data();
  const double* pb = b.coeffs_.data();
  double* pc = coeffs_.data();
  if (scale == 1.0) {
    for (const auto& t : table_->products()) pc[t.out] += pa[t.lhs] * pb[t.rhs];
  } else {
    for (const auto& t : table_->products()) pc[t.out] += scale * pa[t.lhs] * pb[t.rhs];
  }
}

Jet operator*(const Jet& a, const Jet& b) {
  a.require_same_shape(b);
  Jet out(a.dim(), a.order());
  out.add_product(a, b);
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  a.require_same_shape(b);
  return a * reciprocal(b);
}

Jet jet_arithmetic(const Jet& a, const Jet& b, JetOp op) {
  switch (op) {
    case JetOp::add:
      return a + b;
    case JetOp::sub:
      return a - b;
    case JetOp::mul:
      return a * b;
    case JetOp::div:
      return a / b;
  }
  throw ShapeError("unknown jet operation");
}

Jet compose_univariate(std::span<const double> outer, const Jet& inner) {
  const int m = inner.order();
  if (static_cast<int>(outer.size()) != m + 1) {
    throw ShapeError("outer Taylor table must have order + 1 entries");
  }
  Jet h = inner;
  h.coefficients()[0] = 0.0;
  Jet result = Jet::constant(inner.dim(), m, outer[static_cast<std::size_t>(m)]);
  for (int k = m - 1; k >= 0; --k) {
    Jet next = Jet::constant(inner.dim(), m, outer[static_cast<std::size_t>(k)]);
    next.add_product(result, h);
    result = std::move(next);
  }
  return result;
}

Jet reciprocal(const Jet& b) {
  const double b0 = b.value();
  if (b0 == 0.0) throw Error("division by a jet with zero constant term");
  std::vector<double> outer(static_cast<std::size_t>(b.order()) + 1);
  double p = 1.0 / b0;
  for (auto& c : outer) {
    c = p;
    p *= -1.0 / b0;
  }
  return compose_univariate(outer, b);
}

Jet pow(const Jet& base, int exponent) {
  if (exponent < 0) return reciprocal(pow(base, -exponent));
  Jet result = Jet::constant(base.dim(), base.order(), 1.0);
  Jet square = base;
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1) {
      result = first ? square : result * square;
      first = false;
    }
    exponent >>= 1;
    if (exponent > 0) square = square * square;
  }
  return result;
}

Jet exp(const Jet& u) {
  std::vector<double> outer(static_cast<std::size_t>(u.order()) + 1);
  const double e = std::exp(u.value());
  double inv_fact = 1.0;
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (k > 0) inv_fact /= static_cast<double>(k);
    outer[k] = e * inv_fact;
  }
  return compose_univariate(outer, u);
}

namespace {

// Taylor table of sin(u0 + phase + t).
Jet shifted_sine(const Jet& u, double phase) {
  std::vector<double> outer(static_cast<std::size_t>(u.order()) + 1);
  const double x = u.value() + phase;
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double cycle[4] = {s, c, -s, -c};
  double inv_fact = 1.0;
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (k > 0) inv_fact /= static_cast<double>(k);
    outer[k] = cycle[k % 4] * inv_fact;
  }
  return compose_univariate(outer, u);
}

}  // namespace

Jet sin(const Jet& u) { return shifted_sine(u, 0.0); }

Jet cos(const Jet& u) { return shifted_sine(u, std::numbers::pi / 2.0); }

Jet sqrt(const Jet& u) {
  const double u0 = u.value();
  if (u0 < 0.0 || (u0 == 0.0 && u.order() > 0)) {
    throw Error("sqrt at nonpositive constant term");
  }
  std::vector<double> outer(static_cast<std::size_t>(u.order()) + 1);
  // binom(1/2, k) * u0^(1/2 - k)
  double binom = 1.0;
  double power = std::sqrt(u0);
  for (std::size_t k = 0; k < outer.size(); ++k) {
    if (k > 0) {
      binom *= (0.5 - static_cast<double>(k - 1)) / static_cast<double>(k);
      power /= u0;
    }
    outer[k] = binom * power;
  }
  return compose_univariate(outer, u);
}

}  // namespace curvlab
