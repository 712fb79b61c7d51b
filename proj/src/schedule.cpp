#include "okl/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "okl/errors.hpp"

namespace okl {

namespace {

// Neumaier's variant of compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

StepSchedule::StepSchedule(double c, double theta) : c_(c), theta_(theta) {
  if (!(std::isfinite(c) && c > 0.0)) throw DomainError("step size constant c must be positive");
  if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("step size decay theta must be positive");
}

double StepSchedule::gamma(std::size_t t) const {
  if (t < 1) throw DomainError("step sizes are indexed from t = 1");
  return c_ * std::pow(static_cast<double>(t), -theta_);
}

const char* to_string(RateTheorem theorem) {
  switch (theorem) {
    case RateTheorem::Pointwise: return "thm2";
    case RateTheorem::Pairwise: return "thm3";
    case RateTheorem::PairwiseBoundedGradient: return "thm4";
  }
  return "unknown";
}

double AdmissibilityReport::exponent_thm3(double delta) const {
  return std::min(theta / 2.0 - 0.25 - delta / 2.0, 1.0 - theta - delta);
}

double AdmissibilityReport::exponent_thm4(double delta) const {
  return std::min(theta / 4.0 - delta / 2.0, 1.0 - theta - delta);
}

AdmissibilityReport validate_schedule(const StepSchedule& schedule, const ActivatingLoss& loss,
                                      const std::optional<PairKernel>& pair_kernel) {
  AdmissibilityReport r;
  r.alpha = loss.alpha();
  r.theta = schedule.theta();
  r.c = schedule.c();
  r.square_summable_1plusalpha = r.theta * (1.0 + r.alpha) > 1.0;
  r.summable_diverges = r.theta <= 1.0;
  r.theorem2_valid = r.square_summable_1plusalpha && r.theta < 1.0;
  r.theorem3_theta_ok = r.theta > 0.5 && r.theta < 1.0;
  r.one_activating = loss.is_one_activating();
  r.bounded_gradient = loss.grad_bound().has_value();
  r.exponent_thm2 = std::min(r.alpha * r.theta / 2.0, 1.0 - r.theta);
  if (pair_kernel) {
    const double kt = pair_kernel->kappa_tilde();
    r.pairwise_kernel_given = true;
    r.kappa_tilde = kt;
    r.c_max = 1.0 / (4.0 * kt * kt * loss.holder_L());
    r.theorem3_c_ok = r.c * kt * kt <= 1.0 / (4.0 * loss.holder_L());
  }
  return r;
}

double theoretical_exponent(RateTheorem theorem, double alpha, double theta, double delta) {
  auto fail = [&](const char* why) {
    std::ostringstream msg;
    msg << to_string(theorem) << " exponent undefined for alpha=" << alpha << ", theta=" << theta
        << ", delta=" << delta << ": " << why;
    throw DomainError(msg.str());
  };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  switch (theorem) {
    case RateTheorem::Pointwise:
      if (!(theta * (1.0 + alpha) > 1.0 && theta < 1.0)) fail("theta must lie in (1/(1+alpha), 1)");
      return std::min(alpha * theta / 2.0, 1.0 - theta);
    case RateTheorem::Pairwise:
      if (!(theta > 0.5 && theta < 1.0)) fail("theta must lie in (1/2, 1)");
      if (!(delta > 0.0 && delta < std::min(theta - 0.5, 1.0 - theta)))
        fail("delta must lie in (0, min(theta - 1/2, 1 - theta))");
      return std::min(theta / 2.0 - 0.25 - delta / 2.0, 1.0 - theta - delta);
    case RateTheorem::PairwiseBoundedGradient:
      if (!(theta > 0.5 && theta < 1.0)) fail("theta must lie in (1/2, 1)");
      if (!(delta > 0.0 && delta < std::min(theta / 4.0, 1.0 - theta)))
        fail("delta must lie in (0, min(theta/4, 1 - theta))");
      return std::min(theta / 4.0 - delta / 2.0, 1.0 - theta - delta);
  }
  fail("unknown theorem");
  return 0.0;
}

double gamma_power_sum(const StepSchedule& schedule, double p, std::size_t from, std::size_t to) {
  from = std::max<std::size_t>(from, 1);
  if (to < from) return 0.0;
  const double cp = std::pow(schedule.c(), p);
  const double e = -schedule.theta() * p;
  CompensatedSum s;
  for (std::size_t j = from; j <= to; ++j) s.add(cp * std::pow(static_cast<double>(j), e));
  return s.value();
}

double power_sum_bound(const StepSchedule& schedule, double alpha) {
  const double denom = schedule.theta() * (1.0 + alpha) - 1.0;
  if (!(denom > 0.0)) throw DomainError("the power sum diverges unless theta (1 + alpha) > 1");
  return 2.0 * std::pow(schedule.c(), 1.0 + alpha) / denom;
}

double lemma4_envelope(const StepSchedule& schedule, const ActivatingLoss& loss, std::size_t t) {
  const double cp = c_phi(loss);
  return cp * std::sqrt(gamma_power_sum(schedule, 1.0, 2, t));
}

std::vector<double> lemma4_envelopes(const StepSchedule& schedule, const ActivatingLoss& loss,
                                     std::size_t t_max) {
  const double cp = c_phi(loss);
  std::vector<double> out(t_max, 0.0);
  CompensatedSum s;
  for (std::size_t t = 2; t <= t_max; ++t) {
    s.add(schedule.gamma(t));
    out[t - 1] = cp * std::sqrt(s.value());
  }
  return out;
}

double lemma4_closed_form(const StepSchedule& schedule, const ActivatingLoss& loss, std::size_t t) {
  const double theta = schedule.theta();
  if (!(theta < 1.0)) throw DomainError("the closed-form envelope needs theta < 1");
  const double cp = c_phi(loss);
  return std::sqrt(schedule.c()) * cp / std::sqrt(1.0 - theta) *
         std::pow(static_cast<double>(t), (1.0 - theta) / 2.0);
}

}  // namespace okl
