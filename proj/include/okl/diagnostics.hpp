#pragma once

#include <cstddef>

#include "okl/losses.hpp"
#include "okl/schedule.hpp"

// Closed-form quantities from the convergence analysis. They contain
// distribution-dependent terms and are reported for information only; none of
// them is asserted against a measured run.

namespace okl {

/// L^2 (1 + 1/alpha)^alpha kappa^{2(1+alpha)}.
double a_alpha(const ActivatingLoss& loss, double kappa);

/// kappa^2 (1+alpha)^2 L^{2/(1+alpha)} alpha^{-2 alpha/(1+alpha)}.
double b_alpha(const ActivatingLoss& loss, double kappa);

/// (1 + E(g_1)) exp(A_alpha sum_{j=1}^t gamma_j^{1+alpha}), the bound on the
/// expected risk after t steps. initial_risk is E(g_1) = phi(0) for g_1 = 0.
double expected_risk_bound(const ActivatingLoss& loss, double kappa, const StepSchedule& schedule,
                           double initial_risk, std::size_t t);

/// The t -> infinity limit with the partial sum replaced by its closed-form
/// bound. DomainError unless theta (1 + alpha) > 1.
double expected_risk_limit(const ActivatingLoss& loss, double kappa, const StepSchedule& schedule,
                           double initial_risk);

/// ||g_H||^2 + 2 theta c^2 B_alpha D^{2alpha/(1+alpha)} / (2 theta - 1) with D
/// the risk limit above. DomainError unless theta > 1/2.
double distance_to_minimizer_bound(const ActivatingLoss& loss, double kappa,
                                   const StepSchedule& schedule, double initial_risk,
                                   double minimizer_norm);

/// exp((1 + 32 kappa_tilde^4 L^2) c^2 / (2 theta - 1)) (||f_H||^2 + sigma^2 (4 + ln t)).
/// sigma^2 is a free parameter because it depends on the unknown distribution.
double pairwise_distance_bound(const ActivatingLoss& loss, double kappa_tilde,
                               const StepSchedule& schedule, double minimizer_norm,
                               double sigma_sq, std::size_t t);

/// sup_{|s| <= 2 kappa_tilde D} |phi'(s)|; phi' is monotone so the endpoints suffice.
double gradient_sup_on_ball(const ActivatingLoss& loss, double kappa_tilde, double envelope);

}  // namespace okl
