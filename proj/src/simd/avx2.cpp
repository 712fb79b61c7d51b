// AVX2 + FMA backend. This file is the only one compiled with -mavx2 -mfma;
// it deliberately includes no standard headers with inline code so that no
// AVX-encoded copy of a shared inline function can leak into other objects.

#if defined(OKL_HAVE_AVX2_TU)

#include <immintrin.h>

#include <cstddef>

#include "backends.hpp"

namespace okl::simd::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp on four doubles. Range reduction x = n ln2 + r with |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation < 5e-18 relative) and 2^n assembled
// in the exponent field. Inputs below -708.39 flush to 0, above 709.78 to +inf.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39);
  const __m256d hi = _mm256_set1_pd(709.78);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  x = _mm256_max_pd(_mm256_min_pd(x, _mm256_set1_pd(709.7)), lo);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // n is integral and |n| < 2^51: adding 1.5*2^52 puts it in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                      _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_inf()), over);
  return result;
}

inline __m256d sq_dist4(const double* const* cols, std::size_t dim, std::size_t i,
                        const double* x) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < dim; ++k) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(cols[k] + i), _mm256_set1_pd(x[k]));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  return acc;
}

inline __m256d load_tail(const double* p, std::size_t count) {
  double buf[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < count; ++j) buf[j] = p[j];
  return _mm256_loadu_pd(buf);
}

inline void store_tail(double* p, __m256d v, std::size_t count) {
  double buf[kLanes];
  _mm256_storeu_pd(buf, v);
  for (std::size_t j = 0; j < count; ++j) p[j] = buf[j];
}

inline __m256d sq_dist_tail(const double* const* cols, std::size_t dim, std::size_t i,
                            std::size_t count, const double* x) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < dim; ++k) {
    const __m256d d = _mm256_sub_pd(load_tail(cols[k] + i, count), _mm256_set1_pd(x[k]));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  return acc;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes),
                           acc1);
  }
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  if (i < n) acc1 = _mm256_fmadd_pd(load_tail(a + i, n - i), load_tail(b + i, n - i), acc1);
  return hsum(_mm256_add_pd(acc0, acc1));
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  if (i < n) {
    const std::size_t rest = n - i;
    store_tail(y + i, _mm256_fmadd_pd(a, load_tail(x + i, rest), load_tail(y + i, rest)), rest);
  }
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(a, _mm256_loadu_pd(x + i)));
  }
  if (i < n) store_tail(x + i, _mm256_mul_pd(a, load_tail(x + i, n - i)), n - i);
}

void sq_dist_row(const double* const* cols, std::size_t dim, std::size_t n,
                 const double* x, double* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, sq_dist4(cols, dim, i, x));
  if (i < n) store_tail(out + i, sq_dist_tail(cols, dim, i, n - i, x), n - i);
}

void dot_row(const double* const* cols, std::size_t dim, std::size_t n,
             const double* x, double* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(cols[k] + i), _mm256_set1_pd(x[k]), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  if (i < n) {
    const std::size_t rest = n - i;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      acc = _mm256_fmadd_pd(load_tail(cols[k] + i, rest), _mm256_set1_pd(x[k]), acc);
    }
    store_tail(out + i, acc, rest);
  }
}

void gaussian_row(const double* const* cols, std::size_t dim, std::size_t n,
                  const double* x, double neg_gamma, double* out) {
  const __m256d g = _mm256_set1_pd(neg_gamma);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, exp_pd(_mm256_mul_pd(g, sq_dist4(cols, dim, i, x))));
  }
  if (i < n) {
    const std::size_t rest = n - i;
    store_tail(out + i, exp_pd(_mm256_mul_pd(g, sq_dist_tail(cols, dim, i, rest, x))), rest);
  }
}

void exp_inplace(double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(v + i, exp_pd(_mm256_loadu_pd(v + i)));
  if (i < n) store_tail(v + i, exp_pd(load_tail(v + i, n - i)), n - i);
}

}  // namespace okl::simd::avx2

#endif  // OKL_HAVE_AVX2_TU
