#pragma once

// Data-parallel inner loops used by kernels, expansions and risk evaluation.
//
// Every primitive has a portable scalar reference implementation and an AVX2
// version; the AVX2 table is chosen at first use when the CPU reports both
// AVX2 and FMA. Results of the two backends agree to a few ulps, not bitwise:
// summation order and the vectorized exp differ from the scalar path.

#include <cstddef>
#include <span>

namespace okl::simd {

enum class Backend { Scalar, Avx2 };

const char* to_string(Backend backend);

bool backend_supported(Backend backend);

/// Widest backend this CPU supports.
Backend best_backend();

Backend active_backend();

/// Forces a backend for the whole process. Throws DomainError when the CPU
/// cannot run it. Not synchronized: call before spawning worker threads.
void set_backend(Backend backend);

/// Points are passed column-wise: cols[k][i] is coordinate k of point i.
struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  void (*sq_dist_row)(const double* const* cols, std::size_t dim, std::size_t n,
                      const double* x, double* out);
  void (*dot_row)(const double* const* cols, std::size_t dim, std::size_t n,
                  const double* x, double* out);
  // out[i] = exp(neg_gamma * ||p_i - x||^2)
  void (*gaussian_row)(const double* const* cols, std::size_t dim, std::size_t n,
                       const double* x, double neg_gamma, double* out);
  void (*exp_inplace)(double* v, std::size_t n);
};

const Ops& ops();
const Ops& ops(Backend backend);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return ops().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ops().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

/// y = S x for a symmetric n x n matrix S stored packed lower-triangular by
/// rows (row i holds S[i][0..i] starting at offset i*(i+1)/2). y is overwritten.
void packed_symv(const double* packed, std::size_t n, const double* x, double* y);

/// x^T S x for the same packed layout.
double packed_quadratic_form(const double* packed, std::size_t n, const double* x);

}  // namespace okl::simd
