#pragma once

// Holomorphic quadratic differentials on the punctured torus, harmonic
// Beltrami differentials, harmonic projection and Weil-Petersson products.
//
// Conventions: q = q(z) dz^2, beta = conj(q) / g with g = 1/(2y^2), lowered
// form A_{zbar zbar} = conj(q).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geolen/surface.hpp"

namespace geolen {

struct Truncation {
  double coset_radius = 0.0;  // 0 for cusp expansions
  int word_cap = 0;
  int terms = 0;              // expansion terms or coset count
  double tail_estimate = 0.0;
};

/// Weight-4 automorphic form evaluated anywhere in H.
class QuadDifferential {
 public:
  using Evaluator = std::function<cplx(cplx)>;

  QuadDifferential(Evaluator eval, Truncation trunc, double residual_bound, std::string label);

  cplx operator()(cplx z) const { return eval_(z); }
  const Truncation& truncation() const { return trunc_; }
  double residual_bound() const { return residual_bound_; }
  const std::string& label() const { return label_; }

  /// max relative |q(gz) g'(z)^2 - q(z)| over random (g, z) samples.
  double automorphy_residual(const FuchsianSurface& s, int samples, std::uint64_t seed) const;

 private:
  Evaluator eval_;
  Truncation trunc_;
  double residual_bound_;
  std::string label_;
};

/// Cusp expansion q(z) = sum_{n >= 1} a_n exp(2 pi i n z / w), fitted by
/// collocation on a horocycle below the Ford domain and evaluated after
/// Ford reduction. Keeps a copy of the surface.
struct CuspExpansion {
  std::shared_ptr<const FuchsianSurface> surface;
  double width = 0.0;
  std::vector<cplx> coeffs;  // coeffs[n - 1] = a_n
  double singular_gap = 0.0;  // smallest / second smallest singular value

  cplx eval_reduced(cplx z) const;
  cplx operator()(cplx z) const;
};

/// Fits the one-dimensional cusp-form space; DegenerateBasis if the
/// collocation system does not have a clean one-dimensional null space.
CuspExpansion fit_cusp_expansion(std::shared_ptr<const FuchsianSurface> surface, int terms = 0);

struct PoincareValue {
  cplx value;
  double tail_estimate;
};

/// Relative Poincare series of a closed geodesic: sum over cosets of <g0> of
/// the pullback of dw^2 / w^2 from the standardized frame. Evaluation reduces
/// the point to the Dirichlet domain first, so the truncated sum is exactly
/// automorphic.
class RelativePoincareSeries {
 public:
  RelativePoincareSeries(const FuchsianSurface& s, const ClosedGeodesic& g, double radius);

  PoincareValue evaluate(cplx z) const;
  std::size_t cosets() const { return reps_.size(); }
  double radius() const { return radius_; }

 private:
  std::shared_ptr<const FuchsianSurface> surface_;
  std::vector<MobiusTransform> reps_;  // S^-1 h
  double radius_;
  double length_;
  HPoint center_;
};

/// Evaluates the series; TruncationTooSmall when tail / |value| exceeds tol.
PoincareValue rel_poincare_theta(const RelativePoincareSeries& series, cplx z, double tol = 1e-3);

/// Basis of integrable holomorphic quadratic differentials (length 1 here).
std::vector<std::shared_ptr<const QuadDifferential>> basis_quadratic(std::shared_ptr<const FuchsianSurface> s);

/// beta = sum_k c_k conj(q_k) / g.
class HarmonicBeltrami {
 public:
  HarmonicBeltrami() = default;
  HarmonicBeltrami(std::vector<std::shared_ptr<const QuadDifferential>> basis, Eigen::VectorXcd coeffs);

  static HarmonicBeltrami zero(std::vector<std::shared_ptr<const QuadDifferential>> basis);

  cplx beta(cplx z) const;
  cplx lowered(cplx z) const;
  double norm_pointwise(cplx z) const { return std::abs(beta(z)); }

  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  const std::vector<std::shared_ptr<const QuadDifferential>>& basis() const { return basis_; }
  bool is_zero() const { return coeffs_.size() == 0 || coeffs_.isZero(0.0); }

  HarmonicBeltrami scaled(cplx c) const { return {basis_, coeffs_ * c}; }
  HarmonicBeltrami operator+(const HarmonicBeltrami& o) const;

 private:
  std::vector<std::shared_ptr<const QuadDifferential>> basis_;
  Eigen::VectorXcd coeffs_;
};

/// Values of a Beltrami coefficient at mesh nodes. An optional exact pairing
/// with a holomorphic quadratic differential (int mu q dx dy) replaces the mesh
/// quadrature when the sample comes with one.
struct BeltramiSample {
  const QuadratureMesh* mesh = nullptr;
  std::vector<cplx> values;
  bool compact_support = false;
  std::function<cplx(const QuadDifferential&)> exact_pairing;
};

/// int mu q dx dy over the surface, by the exact pairing if present.
cplx beltrami_pairing(const BeltramiSample& mu, const QuadDifferential& q, bool force_mesh = false);

/// Gram matrix G_jk = int conj(q_k) q_j / g dx dy.
Eigen::MatrixXcd quadratic_gram(const QuadratureMesh& mesh,
                                const std::vector<std::shared_ptr<const QuadDifferential>>& basis);

HarmonicBeltrami harmonic_projection(const QuadratureMesh& mesh,
                                     const std::vector<std::shared_ptr<const QuadDifferential>>& basis,
                                     const BeltramiSample& mu, bool force_mesh = false);

/// int beta_i conj(beta_j) dA over the mesh.
cplx wp_gram(const QuadratureMesh& mesh, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj);

struct SupNorm {
  double value;        // refined maximum of |beta|
  double mesh_max;     // maximum over mesh nodes
  double uncertainty;  // refinement gain, a bound for the mesh resolution error
  cplx argmax;
};
SupNorm sup_norm(const QuadratureMesh& mesh, const HarmonicBeltrami& a);

/// Field with values on mesh nodes and an evaluator for arbitrary points.
struct SurfaceField {
  const QuadratureMesh* mesh = nullptr;
  std::vector<cplx> values;
  std::function<cplx(cplx)> eval;
  /// Optional evaluator sharing far-field samples with a nearby anchor point,
  /// so that finite-difference stencils around the anchor are consistent.
  std::function<cplx(cplx, cplx)> eval_anchored;

  cplx operator()(cplx z) const { return eval(z); }
  cplx integral() const;
};

SurfaceField constant_field(const QuadratureMesh& mesh, cplx c);

/// beta_i(z) conj(beta_j(z)).
SurfaceField pointwise_product(const QuadratureMesh& mesh, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj);

}  // namespace geolen
