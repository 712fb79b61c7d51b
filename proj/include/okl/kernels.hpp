#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "okl/point_table.hpp"

namespace okl {

enum class KernelFamily { Gaussian, Linear, Polynomial };

const char* to_string(KernelFamily family);

/// Mercer kernel G on a ball of declared radius in R^d.
///   gaussian    exp(-||x - x'||^2 / (2 sigma^2))
///   linear      <x, x'>
///   polynomial  (<x, x'> + offset)^degree
/// The radius only enters kappa(); it is declared, never estimated from data.
class Kernel {
 public:
  static Kernel gaussian(double bandwidth, double domain_radius);
  static Kernel linear(double domain_radius);
  static Kernel polynomial(int degree, double offset, double domain_radius);

  /// ShapeError when dimensions differ.
  double eval(std::span<const double> x, std::span<const double> x2) const;

  /// out[i] = G(p_i, x) for every point of the table (SIMD path).
  void row(const PointTable& points, std::span<const double> x, std::span<double> out) const;
  std::vector<double> row(const PointTable& points, std::span<const double> x) const;

  /// sup over the domain of sqrt(G(x, x)).
  double kappa() const;

  KernelFamily family() const { return family_; }
  double bandwidth() const { return bandwidth_; }
  int degree() const { return degree_; }
  double offset() const { return offset_; }
  double domain_radius() const { return domain_radius_; }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Kernel(KernelFamily family, double bandwidth, int degree, double offset, double radius)
      : family_(family), bandwidth_(bandwidth), degree_(degree), offset_(offset), domain_radius_(radius) {}

  double from_dot(double dot) const;

  KernelFamily family_;
  double bandwidth_;
  int degree_;
  double offset_;
  double domain_radius_;
};

/// Tensor-product kernel on pairs: K((a1, a2), (b1, b2)) = G(a1, b1) G(a2, b2).
class PairKernel {
 public:
  explicit PairKernel(Kernel base) : base_(std::move(base)) {}

  double eval(std::span<const double> a1, std::span<const double> a2,
              std::span<const double> b1, std::span<const double> b2) const;

  /// sup sqrt(K(z, z)) = kappa(base)^2 for the product construction.
  double kappa_tilde() const;

  const Kernel& base() const { return base_; }

  friend bool operator==(const PairKernel&, const PairKernel&) = default;

 private:
  Kernel base_;
};

/// Symmetric Gram matrix of the table (lower triangle evaluated, mirrored).
Matrix gram(const Kernel& kernel, const PointTable& points);

}  // namespace okl
