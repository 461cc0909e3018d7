#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace geolen {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(std::size_t n, double a, double b);

/// Pairwise (tree) summation; order-deterministic.
double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

/// Runs body(i) for i in [0, n) on the available hardware threads. Each index
/// is processed exactly once; callers write results into per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Local maximization of a smooth function of two variables (simplex search).
struct MaxResult {
  double x;
  double y;
  double value;
};
MaxResult maximize_2d(const std::function<double(double, double)>& f, double x0, double y0,
                      double step, double tol = 1e-12, int max_iter = 2000);

}  // namespace geolen
