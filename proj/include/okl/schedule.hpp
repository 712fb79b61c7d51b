#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "okl/kernels.hpp"
#include "okl/losses.hpp"

namespace okl {

/// gamma_t = c t^{-theta}. theta is only required to be positive so that
/// non-summable and summable schedules can both be classified.
class StepSchedule {
 public:
  /// DomainError unless c > 0 and theta > 0 (both finite).
  StepSchedule(double c, double theta);

  /// DomainError for t < 1.
  double gamma(std::size_t t) const;

  double c() const { return c_; }
  double theta() const { return theta_; }

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;

 private:
  double c_;
  double theta_;
};

enum class RateTheorem { Pointwise, Pairwise, PairwiseBoundedGradient };

const char* to_string(RateTheorem theorem);

/// Classification of a schedule against the convergence conditions.
///
/// Summability uses the product form theta (1 + alpha) > 1 throughout, so the
/// series test and the rate-interval test can never disagree on a boundary.
struct AdmissibilityReport {
  double alpha = 1.0;
  double theta = 0.0;
  double c = 0.0;

  bool square_summable_1plusalpha = false;  // sum gamma^{1+alpha} < inf
  bool summable_diverges = false;           // sum gamma = inf
  bool theorem2_valid = false;              // theta in (1/(1+alpha), 1)
  bool pairwise_kernel_given = false;
  bool theorem3_c_ok = false;               // c kappa_tilde^2 <= 1/(4L)
  bool theorem3_theta_ok = false;           // theta in (1/2, 1)
  bool one_activating = false;
  bool bounded_gradient = false;
  std::optional<double> kappa_tilde;
  std::optional<double> c_max;              // 1/(4 kappa_tilde^2 L)

  double exponent_thm2 = 0.0;               // min(alpha theta/2, 1 - theta)

  /// min(theta/2 - 1/4 - delta/2, 1 - theta - delta).
  double exponent_thm3(double delta) const;
  /// min(theta/4 - delta/2, 1 - theta - delta).
  double exponent_thm4(double delta) const;

  /// Pairwise guarantees need a 1-activating loss, theta in (1/2, 1) and an
  /// admissible c.
  bool pairwise_proven_regime() const { return one_activating && theorem3_theta_ok && theorem3_c_ok; }
};

AdmissibilityReport validate_schedule(const StepSchedule& schedule, const ActivatingLoss& loss,
                                      const std::optional<PairKernel>& pair_kernel = std::nullopt);

/// The rate exponent of the selected theorem. DomainError outside its range:
///   Pointwise                alpha in (0,1], theta (1+alpha) > 1, theta < 1
///   Pairwise                 theta in (1/2,1), delta in (0, min(theta - 1/2, 1 - theta))
///   PairwiseBoundedGradient  theta in (1/2,1), delta in (0, min(theta/4, 1 - theta))
double theoretical_exponent(RateTheorem theorem, double alpha, double theta, double delta = 0.0);

/// sum_{j=from}^{to} gamma_j^p with compensated summation; 0 when to < from.
double gamma_power_sum(const StepSchedule& schedule, double p, std::size_t from, std::size_t to);

/// 2 c^{1+alpha} / (theta (1+alpha) - 1), the partial-sum bound for
/// theta (1+alpha) > 1. DomainError otherwise.
double power_sum_bound(const StepSchedule& schedule, double alpha);

/// C_phi sqrt(sum_{j=2}^t gamma_j); 0 for t <= 1. UnsupportedLossError unless alpha = 1.
double lemma4_envelope(const StepSchedule& schedule, const ActivatingLoss& loss, std::size_t t);

/// Envelope for t = 1..t_max in one pass; element t-1 holds the value at t.
std::vector<double> lemma4_envelopes(const StepSchedule& schedule, const ActivatingLoss& loss,
                                     std::size_t t_max);

/// Integral relaxation sqrt(c) C_phi / sqrt(1 - theta) t^{(1-theta)/2}, which
/// dominates the exact envelope. DomainError unless theta < 1.
double lemma4_closed_form(const StepSchedule& schedule, const ActivatingLoss& loss, std::size_t t);

}  // namespace okl
