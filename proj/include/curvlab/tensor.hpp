#pragma once

// Dense tensors at a point. Components are stored row-major (first slot
// slowest). Curvature tensors are kept fully covariant; indices are raised
// only inside contractions.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace curvlab {

inline constexpr int kMaxRank = 6;

enum class Variance : std::uint8_t { covariant, contravariant };

class Tensor {
 public:
  Tensor() = default;
  /// Zero tensor with every slot of the given variance.
  Tensor(int dim, int rank, Variance variance = Variance::covariant);
  Tensor(int dim, std::vector<Variance> variance);

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(variance_.size()); }
  const std::vector<Variance>& variance() const noexcept { return variance_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::size_t offset(std::span<const int> index) const;
  std::size_t offset(std::initializer_list<int> index) const {
    return offset(std::span<const int>(index.begin(), index.size()));
  }

  double& operator()(std::initializer_list<int> index) { return data_[offset(index)]; }
  double operator()(std::initializer_list<int> index) const { return data_[offset(index)]; }
  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  /// Multi-index of a flat offset.
  std::array<int, kMaxRank> unflatten(std::size_t flat) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);
  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Tensor a, double s) { return a *= s; }
  friend Tensor operator*(double s, Tensor a) { return a *= s; }

  /// Largest absolute component.
  double max_abs() const;

 private:
  void require_same_shape(const Tensor& other) const;

  int dim_ = 0;
  std::vector<Variance> variance_;
  std::vector<double> data_;
};

/// Metric, inverse metric and volume factor at one point.
class MetricAtPoint {
 public:
  /// Validates symmetry and positive definiteness (leading principal minors)
  /// and inverts. Throws GeometryError when either check fails.
  static MetricAtPoint from_components(const Tensor& g);

  int dim() const noexcept { return g_.dim(); }
  const Tensor& g() const noexcept { return g_; }
  const Tensor& g_inv() const noexcept { return g_inv_; }
  double sqrt_det() const noexcept { return sqrt_det_; }
  /// Lower-triangular Cholesky factor L with g = L L^T.
  const Tensor& cholesky() const noexcept { return chol_; }

 private:
  Tensor g_;
  Tensor g_inv_;
  Tensor chol_;
  double sqrt_det_ = 0.0;
};

/// Trace over two slots. Covariant pairs use g^{ij}, contravariant pairs g_{ij},
/// mixed pairs a plain trace. Remaining slots keep their order.
Tensor contract(const Tensor& t, int slot_a, int slot_b, const MetricAtPoint& m);

/// Full contraction <a, b> using one inverse metric per covariant slot pair.
double inner(const Tensor& a, const Tensor& b, const MetricAtPoint& m);
double norm2(const Tensor& a, const MetricAtPoint& m);
double norm(const Tensor& a, const MetricAtPoint& m);

/// (a o b)_{ijkl} = a_ik b_jl - a_il b_jk + b_ik a_jl - a_jk b_il.
Tensor kulkarni_nomizu(const Tensor& a, const Tensor& b);

/// s - (tr_g s / n) g.
Tensor traceless_part(const Tensor& s, const MetricAtPoint& m);

/// Change the variance of one slot using g or g^{-1}.
Tensor raise(const Tensor& t, int slot, const MetricAtPoint& m);
Tensor lower(const Tensor& t, int slot, const MetricAtPoint& m);
/// Every slot contravariant.
Tensor raise_all(const Tensor& t, const MetricAtPoint& m);

Tensor outer(const Tensor& a, const Tensor& b);

/// Result slot s carries source slot perm[s].
Tensor permute(const Tensor& t, std::span<const int> perm);

/// max |t - sign * permute(t, perm)|.
double symmetry_defect(const Tensor& t, std::span<const int> perm, double sign);

/// Identity (1,1)-tensor delta^i_j.
Tensor identity_tensor(int dim);

}  // namespace curvlab
