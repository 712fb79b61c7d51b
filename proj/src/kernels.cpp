#include "okl/kernels.hpp"

#include <cmath>
#include <sstream>

#include "okl/errors.hpp"
#include "okl/simd.hpp"

namespace okl {

PointTable::PointTable(std::size_t dim) : columns_(dim) {
  if (dim == 0) throw ShapeError("point dimension must be at least 1");
}

std::size_t PointTable::push_back(std::span<const double> x) {
  if (x.size() != dim()) {
    std::ostringstream msg;
    msg << "point of dimension " << x.size() << " added to a table of dimension " << dim();
    throw ShapeError(msg.str());
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("point coordinates must be finite");
  }
  for (std::size_t k = 0; k < x.size(); ++k) columns_[k].push_back(x[k]);
  return size_++;
}

std::vector<double> PointTable::point(std::size_t i) const {
  std::vector<double> p(dim());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = columns_[k][i];
  return p;
}

std::vector<const double*> PointTable::column_pointers() const {
  std::vector<const double*> ptrs(dim());
  for (std::size_t k = 0; k < ptrs.size(); ++k) ptrs[k] = columns_[k].data();
  return ptrs;
}

void PointTable::reserve(std::size_t n) {
  for (auto& c : columns_) c.reserve(n);
}

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Polynomial: return "polynomial";
  }
  return "unknown";
}

Kernel Kernel::gaussian(double bandwidth, double domain_radius) {
  if (!(bandwidth > 0.0)) throw DomainError("gaussian bandwidth must be positive");
  if (!(domain_radius > 0.0)) throw DomainError("domain radius must be positive");
  return Kernel(KernelFamily::Gaussian, bandwidth, 0, 0.0, domain_radius);
}

Kernel Kernel::linear(double domain_radius) {
  if (!(domain_radius > 0.0)) throw DomainError("domain radius must be positive");
  return Kernel(KernelFamily::Linear, 0.0, 1, 0.0, domain_radius);
}

Kernel Kernel::polynomial(int degree, double offset, double domain_radius) {
  if (degree < 1) throw DomainError("polynomial degree must be a positive integer");
  if (!(offset >= 0.0)) throw DomainError("polynomial offset must be nonnegative");
  if (!(domain_radius > 0.0)) throw DomainError("domain radius must be positive");
  return Kernel(KernelFamily::Polynomial, 0.0, degree, offset, domain_radius);
}

double Kernel::from_dot(double dot) const {
  if (family_ == KernelFamily::Linear) return dot;
  double base = dot + offset_;
  double out = 1.0;
  for (int i = 0; i < degree_; ++i) out *= base;
  return out;
}

double Kernel::eval(std::span<const double> x, std::span<const double> x2) const {
  if (x.size() != x2.size()) throw ShapeError("kernel arguments differ in dimension");
  if (family_ == KernelFamily::Gaussian) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - x2[k];
      sq += d * d;
    }
    return std::exp(-sq / (2.0 * bandwidth_ * bandwidth_));
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * x2[k];
  return from_dot(dot);
}

void Kernel::row(const PointTable& points, std::span<const double> x, std::span<double> out) const {
  if (x.size() != points.dim()) throw ShapeError("kernel row: point dimension mismatch");
  if (out.size() < points.size()) throw ShapeError("kernel row: output too short");
  const auto cols = points.column_pointers();
  const auto& o = simd::ops();
  if (family_ == KernelFamily::Gaussian) {
    o.gaussian_row(cols.data(), points.dim(), points.size(), x.data(),
                   -1.0 / (2.0 * bandwidth_ * bandwidth_), out.data());
    return;
  }
  o.dot_row(cols.data(), points.dim(), points.size(), x.data(), out.data());
  if (family_ == KernelFamily::Polynomial) {
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = from_dot(out[i]);
  }
}

std::vector<double> Kernel::row(const PointTable& points, std::span<const double> x) const {
  std::vector<double> out(points.size());
  row(points, x, out);
  return out;
}

double Kernel::kappa() const {
  switch (family_) {
    case KernelFamily::Gaussian: return 1.0;
    case KernelFamily::Linear: return domain_radius_;
    case KernelFamily::Polynomial:
      return std::pow(domain_radius_ * domain_radius_ + offset_, 0.5 * degree_);
  }
  return 0.0;
}

double PairKernel::eval(std::span<const double> a1, std::span<const double> a2,
                        std::span<const double> b1, std::span<const double> b2) const {
  return base_.eval(a1, b1) * base_.eval(a2, b2);
}

double PairKernel::kappa_tilde() const {
  const double k = base_.kappa();
  return k * k;
}

Matrix gram(const Kernel& kernel, const PointTable& points) {
  if (points.empty()) throw DataError("gram matrix of an empty point list");
  const std::size_t n = points.size();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = points.point(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const auto xj = points.point(j);
      g(i, j) = g(j, i) = kernel.eval(xi, xj);
    }
  }
  return g;
}

}  // namespace okl
