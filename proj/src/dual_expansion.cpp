#include <algorithm>
#include <cmath>
#include <sstream>

#include "okl/errors.hpp"
#include "okl/hypothesis.hpp"
#include "okl/simd.hpp"

namespace okl {

double clamp_quadratic_form(double value, double scale) {
  if (value >= 0.0) return value;
  if (value >= -1e-6 * std::max(scale, 1e-300)) return 0.0;
  std::ostringstream msg;
  msg << "quadratic form " << value << " is negative beyond tolerance (scale " << scale << ")";
  throw NumericalPsdError(msg.str());
}

DualExpansion::DualExpansion(Kernel kernel, std::size_t dim, ExpansionOptions options)
    : kernel_(std::move(kernel)), centers_(dim), options_(options) {}

double DualExpansion::evaluate(std::span<const double> x) const {
  if (x.size() != dim()) throw ShapeError("evaluate: point dimension mismatch");
  if (coefficients_.empty()) return 0.0;
  std::vector<double> k(size());
  kernel_.row(centers_, x, k);
  return simd::dot(k, coefficients_);
}

double DualExpansion::squared_norm() const {
  const std::size_t m = size();
  if (m == 0) return 0.0;
  std::vector<double> k(m);
  double q = 0.0;
  double c2 = 0.0;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto xi = centers_.point(i);
    kernel_.row(centers_, xi, k);
    q += coefficients_[i] * simd::dot(k, coefficients_);
    c2 += coefficients_[i] * coefficients_[i];
    max_diag = std::max(max_diag, k[i]);
  }
  return clamp_quadratic_form(q, c2 * max_diag);
}

double DualExpansion::rkhs_norm() const { return std::sqrt(squared_norm()); }

double DualExpansion::tracked_norm() const {
  if (!options_.track_norm) throw StateError("norm tracking is disabled for this expansion");
  return std::sqrt(std::max(tracked_sq_, 0.0));
}

void DualExpansion::add_scaled_section(std::span<const double> center, double weight,
                                       std::optional<double> value_at_center) {
  if (!std::isfinite(weight)) throw DomainError("section weight must be finite");
  if (center.size() != dim()) throw ShapeError("section center dimension mismatch");
  if (weight == 0.0) return;

  if (options_.track_norm) {
    const double v = value_at_center ? *value_at_center : evaluate(center);
    const double diag = kernel_.eval(center, center);
    tracked_sq_ += 2.0 * weight * v + weight * weight * diag;
  }

  if (options_.merge_duplicates) {
    std::vector<double> key(center.begin(), center.end());
    const auto [it, inserted] = index_.try_emplace(std::move(key), size());
    if (!inserted) {
      coefficients_[it->second] += weight;
      return;
    }
  }
  centers_.push_back(center);
  coefficients_.push_back(weight);
}

}  // namespace okl
