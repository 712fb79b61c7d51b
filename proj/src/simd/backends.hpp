#pragma once

#include <cstddef>

namespace okl::simd::scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void sq_dist_row(const double* const* cols, std::size_t dim, std::size_t n,
                 const double* x, double* out);
void dot_row(const double* const* cols, std::size_t dim, std::size_t n,
             const double* x, double* out);
void gaussian_row(const double* const* cols, std::size_t dim, std::size_t n,
                  const double* x, double neg_gamma, double* out);
void exp_inplace(double* v, std::size_t n);
}  // namespace okl::simd::scalar

#if defined(OKL_HAVE_AVX2_TU)
namespace okl::simd::avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void sq_dist_row(const double* const* cols, std::size_t dim, std::size_t n,
                 const double* x, double* out);
void dot_row(const double* const* cols, std::size_t dim, std::size_t n,
             const double* x, double* out);
void gaussian_row(const double* const* cols, std::size_t dim, std::size_t n,
                  const double* x, double neg_gamma, double* out);
void exp_inplace(double* v, std::size_t n);
}  // namespace okl::simd::avx2
#endif
