#include "okl/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "okl/errors.hpp"

namespace okl {

double a_alpha(const ActivatingLoss& loss, double kappa) {
  const double a = loss.alpha();
  const double L = loss.holder_L();
  return L * L * std::pow(1.0 + 1.0 / a, a) * std::pow(kappa, 2.0 * (1.0 + a));
}

double b_alpha(const ActivatingLoss& loss, double kappa) {
  const double a = loss.alpha();
  const double L = loss.holder_L();
  return kappa * kappa * (1.0 + a) * (1.0 + a) * std::pow(L, 2.0 / (1.0 + a)) *
         std::pow(a, -2.0 * a / (1.0 + a));
}

double expected_risk_bound(const ActivatingLoss& loss, double kappa, const StepSchedule& schedule,
                           double initial_risk, std::size_t t) {
  const double s = gamma_power_sum(schedule, 1.0 + loss.alpha(), 1, t);
  return (1.0 + initial_risk) * std::exp(a_alpha(loss, kappa) * s);
}

double expected_risk_limit(const ActivatingLoss& loss, double kappa, const StepSchedule& schedule,
                           double initial_risk) {
  return (1.0 + initial_risk) * std::exp(a_alpha(loss, kappa) * power_sum_bound(schedule, loss.alpha()));
}

double distance_to_minimizer_bound(const ActivatingLoss& loss, double kappa,
                                   const StepSchedule& schedule, double initial_risk,
                                   double minimizer_norm) {
  const double theta = schedule.theta();
  if (!(theta > 0.5)) throw DomainError("the distance bound needs theta > 1/2");
  const double a = loss.alpha();
  const double d = expected_risk_limit(loss, kappa, schedule, initial_risk);
  const double c = schedule.c();
  return minimizer_norm * minimizer_norm +
         2.0 * theta * c * c * b_alpha(loss, kappa) * std::pow(d, 2.0 * a / (1.0 + a)) / (2.0 * theta - 1.0);
}

double pairwise_distance_bound(const ActivatingLoss& loss, double kappa_tilde,
                               const StepSchedule& schedule, double minimizer_norm,
                               double sigma_sq, std::size_t t) {
  const double theta = schedule.theta();
  if (!(theta > 0.5)) throw DomainError("the pairwise distance bound needs theta > 1/2");
  if (t < 1) throw DomainError("t must be at least 1");
  const double L = loss.holder_L();
  const double k4 = std::pow(kappa_tilde, 4.0);
  const double c = schedule.c();
  return std::exp((1.0 + 32.0 * k4 * L * L) * c * c / (2.0 * theta - 1.0)) *
         (minimizer_norm * minimizer_norm + sigma_sq * (4.0 + std::log(static_cast<double>(t))));
}

double gradient_sup_on_ball(const ActivatingLoss& loss, double kappa_tilde, double envelope) {
  const double r = 2.0 * kappa_tilde * envelope;
  return std::max(std::abs(loss.grad(-r)), std::abs(loss.grad(r)));
}

}  // namespace okl
