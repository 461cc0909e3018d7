#include "geolen/numerics.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <atomic>
#include <memory>
#include <thread>

namespace geolen {

GaussRule gauss_legendre(std::size_t n, double a, double b) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, i, &rule.nodes[i], &rule.weights[i], table.get());
  }
  return rule;
}

namespace {

template <typename T>
T tree_sum(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const auto& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return tree_sum(v.subspan(0, h)) + tree_sum(v.subspan(h));
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return tree_sum(v); }
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) { return tree_sum(v); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
}

namespace {

struct Objective {
  const std::function<double(double, double)>* f;
};

double negated(const gsl_vector* v, void* params) {
  const auto* obj = static_cast<Objective*>(params);
  return -(*obj->f)(gsl_vector_get(v, 0), gsl_vector_get(v, 1));
}

}  // namespace

MaxResult maximize_2d(const std::function<double(double, double)>& f, double x0, double y0,
                      double step, double tol, int max_iter) {
  Objective obj{&f};
  gsl_multimin_function fn{&negated, 2, &obj};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(2), &gsl_vector_free);
  gsl_vector_set(x.get(), 0, x0);
  gsl_vector_set(x.get(), 1, y0);
  gsl_vector_set_all(ss.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2), &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
  for (int it = 0; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != 0) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), tol) == GSL_SUCCESS) break;
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
  return {gsl_vector_get(best, 0), gsl_vector_get(best, 1), -gsl_multimin_fminimizer_minimum(s.get())};
}

}  // namespace geolen
