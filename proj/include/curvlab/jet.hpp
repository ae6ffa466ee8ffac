#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A jet of dimension n and order m stores c_alpha = d^alpha f / alpha! at a base
// point for every multi-index |alpha| <= m. Coefficients are laid out in graded
// lexicographic order: first by total degree, then lexicographically with the
// exponent of x1 most significant and larger exponents first. For n = 2, m = 2:
//
//   1, x1, x2, x1^2, x1 x2, x2^2
//
// Because the order is graded, the first C(n+k, k) entries of an order-m table
// are exactly the order-k table, so truncation is a resize.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace curvlab {

inline constexpr int kMaxJetOrder = 4;
inline constexpr int kMaxJetDim = 8;

using MultiIndex = std::array<std::uint8_t, kMaxJetDim>;

/// Enumeration of multi-indices for one (dimension, order) pair together with
/// the precomputed product and derivative maps. Tables are created on first
/// use, cached for the life of the process and never mutated afterwards.
class MultiIndexTable {
 public:
  struct ProductTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct DerivativeTerm {
    std::uint32_t src;  // index in this table
    std::uint32_t dst;  // index in the order-1 table
    double factor;
  };

  static const MultiIndexTable& get(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return indices_.size(); }

  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }
  /// alpha! for entry k.
  double factorial(std::size_t k) const { return factorials_[k]; }

  /// Position of `alpha` in the table; throws ShapeError if |alpha| > order.
  std::size_t position(const MultiIndex& alpha) const;

  /// All (lhs, rhs, out) with alpha_lhs + alpha_rhs = alpha_out, |alpha_out| <= order.
  std::span<const ProductTerm> products() const noexcept { return products_; }
  std::span<const DerivativeTerm> derivative(int var) const {
    return derivatives_.at(static_cast<std::size_t>(var));
  }

  /// C(n + m, m).
  static std::size_t table_size(int dim, int order);

 private:
  MultiIndexTable(int dim, int order);

  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::vector<double> factorials_;
  std::vector<ProductTerm> products_;
  std::vector<std::vector<DerivativeTerm>> derivatives_;
};

class Jet {
 public:
  /// Zero jet of the given shape.
  Jet(int dim, int order);

  static Jet constant(int dim, int order, double value);
  /// The coordinate function x_var expanded at a base point where x_var = value.
  static Jet variable(int dim, int order, int var, double value);

  int dim() const noexcept { return table_->dim(); }
  int order() const noexcept { return table_->order(); }
  const MultiIndexTable& table() const noexcept { return *table_; }

  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<double> coefficients() noexcept { return coeffs_; }

  double value() const noexcept { return coeffs_[0]; }
  double coefficient(const MultiIndex& alpha) const;

  /// Raw partial derivative alpha! * c_alpha. `alpha` holds one exponent per variable.
  double partial(std::span<const int> alpha) const;

  /// d/dx_var as a jet of order m - 1. Requires m >= 1.
  Jet derivative(int var) const;
  /// Gradient at the base point (first-order coefficients).
  std::vector<double> gradient() const;
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s);
  Jet& operator+=(double s) {
    coeffs_[0] += s;
    return *this;
  }

  /// this += scale * a * b (truncated product).
  void add_product(const Jet& a, const Jet& b, double scale = 1.0);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  void require_same_shape(const Jet& other) const;

  const MultiIndexTable* table_;
  std::vector<double> coeffs_;
};

enum class JetOp { add, sub, mul, div };

Jet jet_arithmetic(const Jet& a, const Jet& b, JetOp op);

/// sum_k outer[k] * (inner - inner.value())^k, with outer[k] = f^(k)(u0) / k!.
/// `outer` must hold exactly inner.order() + 1 entries.
Jet compose_univariate(std::span<const double> outer, const Jet& inner);

Jet reciprocal(const Jet& b);
Jet pow(const Jet& base, int exponent);
Jet exp(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
/// Throws Error when the constant term is negative, or zero with order > 0.
Jet sqrt(const Jet& u);

}  // namespace curvlab
