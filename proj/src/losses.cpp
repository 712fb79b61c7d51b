#include "okl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "okl/errors.hpp"

namespace okl {
namespace {

void require_finite(double s) {
  if (!std::isfinite(s)) throw DomainError("loss argument must be finite");
}

double logistic_value(double s) {
  // log(1 + e^{-s}) without overflow for large |s|
  return s > 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
}

double logistic_grad(double s) {
  if (s >= 0.0) {
    const double e = std::exp(-s);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(s));
}

}  // namespace

ActivatingLoss ActivatingLoss::least_squares() {
  Constants k;
  k.alpha = 1.0;
  k.holder_L = 2.0;
  k.stationary_s0 = 1.0;
  return ActivatingLoss(Family::LeastSquares, "least_squares", k);
}

ActivatingLoss ActivatingLoss::logistic() {
  Constants k;
  k.alpha = 1.0;
  k.holder_L = 0.25;
  k.grad_bound = 1.0;
  return ActivatingLoss(Family::Logistic, "logistic", k);
}

ActivatingLoss ActivatingLoss::qnorm(double q) {
  if (!(q > 1.0 && q <= 2.0)) throw DomainError("qnorm exponent q must lie in (1, 2]");
  Constants k;
  k.alpha = q - 1.0;
  k.holder_L = q;
  k.stationary_s0 = 1.0;
  k.q = q;
  return ActivatingLoss(Family::QNorm, "qnorm", k);
}

ActivatingLoss ActivatingLoss::custom(std::string name, Scalar phi, Scalar dphi,
                                      Constants constants) {
  if (!(constants.alpha > 0.0 && constants.alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1]");
  }
  if (!(constants.holder_L > 0.0)) throw DomainError("Hoelder constant L must be positive");
  if (!phi || !dphi) throw DomainError("custom loss needs both phi and phi'");
  ActivatingLoss loss(Family::Custom, std::move(name), constants);
  loss.phi_ = std::move(phi);
  loss.dphi_ = std::move(dphi);
  return loss;
}

double ActivatingLoss::eval(double s) const {
  require_finite(s);
  switch (family_) {
    case Family::LeastSquares: return (1.0 - s) * (1.0 - s);
    case Family::Logistic: return logistic_value(s);
    case Family::QNorm: return std::pow(std::max(1.0 - s, 0.0), *constants_.q);
    case Family::Custom: return phi_(s);
  }
  return 0.0;
}

double ActivatingLoss::grad(double s) const {
  require_finite(s);
  switch (family_) {
    case Family::LeastSquares: return -2.0 * (1.0 - s);
    case Family::Logistic: return logistic_grad(s);
    case Family::QNorm: {
      const double q = *constants_.q;
      return -q * std::pow(std::max(1.0 - s, 0.0), q - 1.0);
    }
    case Family::Custom: return dphi_(s);
  }
  return 0.0;
}

ActivatingLoss make_loss(const std::string& name, std::optional<double> q) {
  if (name == "least_squares") return ActivatingLoss::least_squares();
  if (name == "logistic") return ActivatingLoss::logistic();
  if (name == "qnorm") {
    if (!q) throw UsageError("qnorm needs an exponent q in (1, 2]");
    if (!(*q > 1.0 && *q <= 2.0)) {
      std::ostringstream msg;
      msg << "qnorm exponent q = " << *q << " outside (1, 2]";
      throw UsageError(msg.str());
    }
    return ActivatingLoss::qnorm(*q);
  }
  throw UsageError("unknown loss '" + name + "' (expected least_squares, logistic or qnorm)");
}

double Prop1Report::min_residual() const { return std::min(std::min(a, b), std::min(c, d)); }

Prop1Report check_proposition1(const ActivatingLoss& loss, double s, double s_tilde) {
  const double alpha = loss.alpha();
  const double L = loss.holder_L();
  const double phi_s = loss.eval(s);
  const double phi_t = loss.eval(s_tilde);
  const double g_s = loss.grad(s);
  const double g_t = loss.grad(s_tilde);
  const double gap = std::abs(s - s_tilde);
  const double dgrad = std::abs(g_s - g_t);
  const double power = (1.0 + alpha) / alpha;
  const double inv_L_root = std::pow(L, -1.0 / alpha);

  Prop1Report r;
  r.a = L / (1.0 + alpha) * std::pow(gap, 1.0 + alpha) -
        (phi_s - phi_t - g_t * (s - s_tilde));
  r.b = phi_t - phi_s - g_s * (s_tilde - s) -
        alpha * inv_L_root / (1.0 + alpha) * std::pow(dgrad, power);
  r.c = (g_s - g_t) * (s - s_tilde) -
        2.0 * alpha * inv_L_root / (1.0 + alpha) * std::pow(dgrad, power);
  r.d = std::pow(1.0 + alpha, 1.0 + 1.0 / alpha) / alpha * std::pow(L, 1.0 / alpha) * phi_s -
        std::pow(std::abs(g_s), power);
  return r;
}

double c_phi(const ActivatingLoss& loss) {
  if (!loss.is_one_activating()) {
    throw UnsupportedLossError("the norm-growth constant is defined for 1-activating losses only ('" +
                               loss.name() + "' has alpha != 1)");
  }
  const double L = loss.holder_L();
  if (const auto s0 = loss.stationary_s0()) return std::sqrt(L) * *s0;
  const double g0 = loss.grad(0.0);
  return std::sqrt(2.0 * loss.eval(0.0) + 2.0 * g0 * g0 / L);
}

double sup_quadratic_bound(const ActivatingLoss& loss, double step_kappa_sq) {
  if (!loss.is_one_activating()) {
    throw UnsupportedLossError("sup bound is stated for 1-activating losses only");
  }
  const double limit = 1.0 / (4.0 * loss.holder_L());
  if (!(step_kappa_sq >= 0.0) || step_kappa_sq > limit) {
    std::ostringstream msg;
    msg << "step * kappa_tilde^2 = " << step_kappa_sq << " violates 0 <= k <= 1/(4L) = " << limit;
    throw PreconditionError(msg.str());
  }
  const auto objective = [&](double s) {
    const double g = loss.grad(s);
    return 4.0 * g * g * step_kappa_sq - 2.0 * g * s;
  };

  constexpr std::size_t kPoints = 100000;
  constexpr double kLo = -50.0;
  constexpr double kHi = 50.0;
  const double h = (kHi - kLo) / static_cast<double>(kPoints - 1);
  std::size_t best = 0;
  double best_value = objective(kLo);
  for (std::size_t i = 1; i < kPoints; ++i) {
    const double v = objective(kLo + h * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  double a = kLo + h * static_cast<double>(best == 0 ? 0 : best - 1);
  double b = kLo + h * static_cast<double>(std::min(best + 1, kPoints - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int iter = 0; iter < 100 && (b - a) > 1e-14; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    }
  }
  return std::max({best_value, f1, f2});
}

std::pair<double, double> log_linearization_bound(double x, double nu, double a) {
  if (!(x > 0.0) || !(nu > 0.0) || !(a > 0.0)) {
    throw DomainError("log linearization needs x, nu, a > 0");
  }
  return {a * std::log(x), nu * x + a * std::log(a / (nu * std::exp(1.0)))};
}

bool LossBattery::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LossCheck& c) { return c.passed; });
}

LossBattery verify_loss(const ActivatingLoss& loss, const BatteryOptions& opt) {
  LossBattery battery;
  battery.loss_name = loss.name();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-opt.range, opt.range);

  std::vector<double> s(opt.samples), t(opt.samples), lam(opt.samples);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    s[i] = unif(rng);
    t[i] = unif(rng);
    lam[i] = unit(rng);
  }

  auto add = [&](std::string name, bool ok, double worst, std::string detail) {
    battery.checks.push_back({std::move(name), ok, worst, std::move(detail)});
  };

  {
    double worst = 0.0;
    for (double si : s) {
      const double fd = (loss.eval(si + opt.fd_step) - loss.eval(si - opt.fd_step)) / (2.0 * opt.fd_step);
      const double g = loss.grad(si);
      worst = std::max(worst, std::abs(g - fd) / std::max(1.0, std::abs(g)));
    }
    add("gradient_consistency", worst <= opt.fd_tolerance, worst, "max relative error vs central difference");
  }
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const double lhs = std::abs(loss.grad(s[i]) - loss.grad(t[i]));
      const double rhs = loss.holder_L() * std::pow(std::abs(s[i] - t[i]), loss.alpha());
      worst = std::max(worst, lhs - rhs);
    }
    add("hoelder_certificate", worst <= opt.inequality_slack, worst, "max of |dphi| - L|ds|^alpha");
  }
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      worst = std::min(worst, check_proposition1(loss, s[i], t[i]).min_residual());
    }
    add("inequality_residuals", worst >= -opt.inequality_slack, worst, "min residual over parts a-d");
  }
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const double mid = lam[i] * s[i] + (1.0 - lam[i]) * t[i];
      const double slack = lam[i] * loss.eval(s[i]) + (1.0 - lam[i]) * loss.eval(t[i]) - loss.eval(mid);
      worst = std::min(worst, slack);
    }
    add("convexity", worst >= -opt.inequality_slack, worst, "min chord slack");
  }
  {
    double worst = 0.0;
    for (double si : s) worst = std::min(worst, loss.eval(si));
    add("nonnegativity", worst >= 0.0, worst, "min phi(s)");
  }
  {
    const double g0 = loss.grad(0.0);
    add("negative_slope_at_zero", g0 < 0.0, g0, "phi'(0)");
  }
  {
    if (const auto s0 = loss.stationary_s0()) {
      const double g = std::abs(loss.grad(*s0));
      add("stationary_branch", g <= 1e-12, g, "|phi'(s0)| for the declared s0");
    } else {
      double worst = -1e300;
      const std::size_t grid = 20001;
      for (std::size_t i = 0; i < grid; ++i) {
        const double si = -opt.range + 2.0 * opt.range * static_cast<double>(i) / (grid - 1);
        worst = std::max(worst, loss.grad(si));
      }
      add("stationary_branch", worst < 0.0, worst, "max phi'(s) on grid (must stay negative)");
    }
  }
  if (const auto bound = loss.grad_bound()) {
    double worst = 0.0;
    for (double si : s) worst = std::max(worst, std::abs(loss.grad(si)) - *bound);
    add("gradient_bound", worst <= opt.inequality_slack, worst, "max |phi'(s)| - B");
  }
  if (loss.is_one_activating()) {
    const double cap = c_phi(loss);
    const double limit = 1.0 / (4.0 * loss.holder_L());
    std::uniform_real_distribution<double> steps(0.0, limit);
    double worst = -1e300;
    for (std::size_t i = 0; i < opt.sup_trials; ++i) {
      const double k = i == 0 ? limit : steps(rng);
      worst = std::max(worst, sup_quadratic_bound(loss, k) - cap * cap);
    }
    add("sup_quadratic_bound", worst <= opt.sup_slack, worst, "max of sup - C_phi^2");
  }
  return battery;
}

}  // namespace okl
