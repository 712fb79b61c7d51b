#include <atomic>

#include "backends.hpp"
#include "okl/errors.hpp"
#include "okl/simd.hpp"

namespace okl::simd {
namespace {

constexpr Ops kScalarOps{
    &scalar::dot,          &scalar::axpy,         &scalar::scale,       &scalar::sq_dist_row,
    &scalar::dot_row,      &scalar::gaussian_row, &scalar::exp_inplace,
};

#if defined(OKL_HAVE_AVX2_TU)
constexpr Ops kAvx2Ops{
    &avx2::dot,          &avx2::axpy,         &avx2::scale,       &avx2::sq_dist_row,
    &avx2::dot_row,      &avx2::gaussian_row, &avx2::exp_inplace,
};
#endif

bool cpu_has_avx2() {
#if defined(OKL_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{&ops(best_backend())};
  return slot;
}

}  // namespace

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
  }
  return false;
}

Backend best_backend() {
  return backend_supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

const Ops& ops(Backend backend) {
#if defined(OKL_HAVE_AVX2_TU)
  if (backend == Backend::Avx2) {
    if (!backend_supported(Backend::Avx2)) throw DomainError("AVX2 backend not supported on this CPU");
    return kAvx2Ops;
  }
#else
  if (backend == Backend::Avx2) throw DomainError("AVX2 backend not compiled in");
#endif
  return kScalarOps;
}

const Ops& ops() { return *active_slot().load(std::memory_order_relaxed); }

Backend active_backend() {
  return &ops() == &kScalarOps ? Backend::Scalar : Backend::Avx2;
}

void set_backend(Backend backend) { active_slot().store(&ops(backend), std::memory_order_relaxed); }

void packed_symv(const double* packed, std::size_t n, const double* x, double* y) {
  const Ops& o = ops();
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = packed + i * (i + 1) / 2;
    y[i] += o.dot(row, x, i + 1);
    if (i > 0 && x[i] != 0.0) o.axpy(x[i], row, y, i);
  }
}

double packed_quadratic_form(const double* packed, std::size_t n, const double* x) {
  const Ops& o = ops();
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    const double* row = packed + i * (i + 1) / 2;
    off += x[i] * o.dot(row, x, i);
    diag += x[i] * x[i] * row[i];
  }
  return 2.0 * off + diag;
}

}  // namespace okl::simd
