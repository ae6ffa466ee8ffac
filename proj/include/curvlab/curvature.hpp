#pragma once

// Curvature hierarchy at a chart point, computed from exact metric jets.
//
// Conventions (pinned by the round-sphere tests):
//   Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
//   R^a_bcd    = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
//   R_abcd     = g_ae R^e_bcd,  R_ik = g^jl R_ijkl,  R = g^ik R_ik
// so that a round sphere of curvature k has R_ijkl = k (g_ik g_jl - g_il g_jk).
// Covariant derivatives append their slot last: (grad T)_{i..j c} = nabla_c T_{i..j}.
// For second derivatives the first derivative index precedes the second:
// (hess T)_{i..j c d} = nabla_d nabla_c T_{i..j}.

#include <span>
#include <vector>

#include "curvlab/jet.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

/// Tensor whose components are jets: a tensor field known to finite order
/// around the base point.
class JetTensor {
 public:
  JetTensor(int dim, std::vector<Variance> variance, int order);
  JetTensor(int dim, int rank, int order) : JetTensor(dim, std::vector<Variance>(static_cast<std::size_t>(rank), Variance::covariant), order) {}

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(variance_.size()); }
  int order() const noexcept { return order_; }
  const std::vector<Variance>& variance() const noexcept { return variance_; }
  std::size_t size() const noexcept { return comps_.size(); }

  Jet& operator[](std::size_t flat) { return comps_[flat]; }
  const Jet& operator[](std::size_t flat) const { return comps_[flat]; }
  Jet& at(std::initializer_list<int> index);
  const Jet& at(std::initializer_list<int> index) const;

  /// Component values at the base point.
  Tensor value() const;
  JetTensor truncated(int order) const;

 private:
  int dim_;
  std::vector<Variance> variance_;
  int order_;
  std::vector<Jet> comps_;
};

struct MetricJets {
  JetTensor g;
  JetTensor g_inv;
};

/// Metric and inverse metric jets of the given order at `point`. Throws
/// GeometryError if the point is outside the chart domain or the metric is not
/// positive definite there.
MetricJets metric_jets(const MetricSpec& spec, std::span<const double> point, int order);

/// Gamma^k_ij (first slot contravariant) with one order less than the metric jets.
JetTensor christoffel(const MetricJets& metric);

/// Fully covariant Riemann tensor; order drops by one relative to Gamma.
JetTensor riemann(const MetricJets& metric, const JetTensor& gamma);

struct RicciJets {
  JetTensor ricci;
  Jet scalar;
  JetTensor traceless;
};

RicciJets ricci_scalar(const JetTensor& riem, const MetricJets& metric);

/// W = Rm - Ric o g / (n-2) + R g o g / (2 (n-1)(n-2)).
JetTensor weyl(const JetTensor& riem, const RicciJets& ricci, const MetricJets& metric);
/// W = Rm - Ric0 o g / (n-2) - R g o g / (2 n (n-1)); used as a cross-check.
Tensor weyl_traceless_form(const Tensor& riem, const Tensor& traceless_ricci, double scalar,
                           const MetricAtPoint& m);

/// nabla t with the derivative slot appended. `order` in {1, 2} applies the
/// derivative that many times. Throws ShapeError if the result would exceed
/// the rank cap or if the jets are too shallow.
JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma, int order = 1);

/// C_ijk = R_kj,i - R_ki,j - (R_,i g_jk - R_,j g_ik) / (2 (n-1)).
JetTensor cotton(const JetTensor& grad_ricci, const Jet& scalar, const JetTensor& g);

enum class CurvatureLevel {
  /// g, Gamma, Rm, Ric, R, Ric0, W (metric jets of order 2).
  algebraic,
  /// Everything, including two derivatives of W (metric jets of order 4).
  full,
};

struct CurvatureBundle {
  int dim = 0;
  CurvatureLevel level = CurvatureLevel::algebraic;
  std::vector<double> point;
  MetricAtPoint metric;
  Tensor christoffel;  // Gamma^k_ij
  Tensor riemann;
  Tensor ricci;
  double scalar = 0.0;
  Tensor traceless_ricci;
  Tensor weyl;
  Tensor weyl_alt;  // traceless form, for cross-checking

  // Full level only.
  Tensor grad_metric;            // nabla g, rank 3
  Tensor grad_scalar;            // dR, rank 1
  Tensor hess_scalar;            // nabla dR, rank 2
  Tensor grad_ricci;             // rank 3
  Tensor grad_traceless_ricci;   // rank 3
  Tensor hess_traceless_ricci;   // rank 4
  Tensor grad_weyl;              // rank 5
  Tensor hess_weyl;              // rank 6
  Tensor cotton;                 // rank 3
  Tensor cotton_alt;             // traceless-Ricci form, rank 3
  Tensor grad_cotton;            // rank 4
  Tensor grad_norm_traceless_ricci;  // d|Ric0|, rank 1; zero where Ric0 vanishes
  Tensor grad_norm_weyl;             // d|W|, rank 1; zero where W vanishes

  /// |Rm| + |nabla Ric| + |nabla W| + |nabla^2 W| (g-norms; |Rm| alone at the
  /// algebraic level). Floor for the scale of derivative identities, whose
  /// terms can all vanish while rounding error stays proportional to this.
  double reference_scale = 0.0;
};

CurvatureBundle curvature_bundle(const MetricSpec& spec, std::span<const double> point,
                                 CurvatureLevel level = CurvatureLevel::full);

/// B_ij = W_ikjl,lk / (n-3) + W_ikjl R^kl / (n-2).
Tensor bach_direct(const CurvatureBundle& b);
/// B_ij = (C_kij,k + W_ikjl R^kl) / (n-2).
Tensor bach_cotton_form(const CurvatureBundle& b);

/// g^{lm} (nabla_m W)_ijkl.
Tensor weyl_divergence(const CurvatureBundle& b);
/// Delta W_ijkl = g^{ab} (hess W)_ijklab.
Tensor weyl_laplacian(const CurvatureBundle& b);
/// Delta Ric0_ij.
Tensor traceless_ricci_laplacian(const CurvatureBundle& b);

}  // namespace curvlab
