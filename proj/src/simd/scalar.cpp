#include <cmath>

#include "backends.hpp"

namespace okl::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void sq_dist_row(const double* const* cols, std::size_t dim, std::size_t n,
                 const double* x, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = cols[k][i] - x[k];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

void dot_row(const double* const* cols, std::size_t dim, std::size_t n,
             const double* x, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) acc += cols[k][i] * x[k];
    out[i] = acc;
  }
}

void gaussian_row(const double* const* cols, std::size_t dim, std::size_t n,
                  const double* x, double neg_gamma, double* out) {
  sq_dist_row(cols, dim, n, x, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(neg_gamma * out[i]);
}

void exp_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(v[i]);
}

}  // namespace okl::simd::scalar
