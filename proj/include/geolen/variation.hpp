#pragma once

// First and second variation of geodesic length along harmonic Beltrami
// directions, the logarithmic Hessian and the inequality audits.
//
// Internally everything is computed with hermitian unit speed; results in the
// riemannian convention are the same quantities rescaled to the riemannian
// length (factor sqrt 2), so bounds keep their form in both conventions.

#include <map>
#include <string>
#include <vector>

#include "geolen/geodesic_ops.hpp"
#include "geolen/resolvent.hpp"

namespace geolen {

/// min eigenvalue of (M - N); NotHermitian / DimensionMismatch on bad input.
double order_margin(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n);
/// M >= N iff min eigenvalue of (M - N) >= -tol.
bool hermitian_order(const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& n, double tol = 1e-10);

/// d d-bar log l = H / l - dl dl^* / l^2.
Eigen::MatrixXcd log_hessian(double length, const Eigen::VectorXcd& dl, const Eigen::MatrixXcd& h);

/// Primary route on line data: 1/2 int [phi + (2 - D^2)^-1(a_i) conj(a_j)] + (1/4l) int a_i conj(int a_j).
cplx second_variation_line(const PeriodicFunction& phi, const PeriodicFunction& ai, const PeriodicFunction& aj);
/// Alternative route: 1/2 int (phi + a_i conj(a_j)) - 1/2 int M(a_i) conj(a_j).
cplx second_variation_alt_line(const PeriodicFunction& phi, const PeriodicFunction& ai, const PeriodicFunction& aj);

struct BoundCheck {
  std::string name;
  double value = 0.0;   // checked quantity (or min eigenvalue of a difference)
  double bound = 0.0;
  double margin = 0.0;  // signed distance to failure
  double budget = 0.0;  // numerical uncertainty the margin must exceed
  bool pass = false;
};

struct VariationReport {
  std::string word;
  NormConvention convention = NormConvention::Hermitian;
  double length_classical = 0.0;
  double length = 0.0;
  std::size_t samples = 0;
  Eigen::VectorXcd dl;
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd h_alt;
  Eigen::MatrixXcd hlog;
  Eigen::MatrixXcd lower_length;  // lower bound for h
  Eigen::MatrixXcd lower_log;     // lower bound for hlog
  std::vector<double> sup_norms;
  double budget = 0.0;
  std::vector<BoundCheck> checks;
  bool pass = false;
};

struct SumTerm {
  double length;
  Eigen::VectorXcd dl;
  Eigen::MatrixXcd h;
};

struct SumLogReport {
  Eigen::MatrixXcd lhs;
  Eigen::MatrixXcd rhs;
  double margin = 0.0;
  bool pass = false;
};
/// d d-bar log(sum l_j) >= (1 / sum l_k) sum l_j d d-bar log l_j.
SumLogReport sum_log_psh_check(const std::vector<SumTerm>& terms, double tol = 1e-10);

/// Per-geodesic data along the line, cached by the engine.
struct GeodesicLine {
  ClosedGeodesic geodesic;
  std::size_t samples = 0;
  std::vector<PeriodicFunction> restrictions;      // hermitian restriction of each basis element
  std::vector<std::vector<PeriodicFunction>> phi;  // phi of basis pairs (k, l) along the line
};

class VariationEngine {
 public:
  VariationEngine(std::vector<std::shared_ptr<const QuadDifferential>> basis, const QuadratureMesh& data_mesh,
                  Resolvent resolvent, NormConvention convention, std::size_t samples = 0);

  /// Builds (and caches) the restrictions along the geodesic.
  const GeodesicLine& line(const ClosedGeodesic& g);
  /// Same line with phi samples filled in.
  const GeodesicLine& line_with_phi(const ClosedGeodesic& g);

  PeriodicFunction restriction(const GeodesicLine& line, const HarmonicBeltrami& a) const;
  PeriodicFunction phi_on_line(const GeodesicLine& line, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj) const;

  /// (1/2) int a in hermitian units, rescaled to the convention.
  cplx first_variation(const ClosedGeodesic& g, const HarmonicBeltrami& a);
  cplx second_variation(const ClosedGeodesic& g, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj);
  cplx second_variation_alt(const ClosedGeodesic& g, const HarmonicBeltrami& ai, const HarmonicBeltrami& aj);

  VariationReport bounds_report(const ClosedGeodesic& g, const std::vector<HarmonicBeltrami>& directions,
                                const std::vector<SupNorm>& sup_norms);

  NormConvention convention() const { return convention_; }
  double scale() const;  // convention length / hermitian length

 private:
  GeodesicLine& entry(const ClosedGeodesic& g);

  std::vector<std::shared_ptr<const QuadDifferential>> basis_;
  const QuadratureMesh* data_mesh_;
  Resolvent resolvent_;
  NormConvention convention_;
  std::size_t samples_;
  std::vector<std::vector<SurfaceField>> chi_;
  std::map<std::string, GeodesicLine> cache_;
};

}  // namespace geolen
