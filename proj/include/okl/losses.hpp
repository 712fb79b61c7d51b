#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace okl {

/// Convex differentiable nonnegative loss phi whose derivative is
/// alpha-Hoelder with constant L, and phi'(0) < 0.
///
/// The three built-in families carry verified constants:
///   least_squares  (1 - s)^2          alpha = 1,     L = 2,   s0 = 1
///   logistic       log(1 + e^{-s})    alpha = 1,     L = 1/4, |phi'| <= 1
///   qnorm(q)       max(1 - s, 0)^q    alpha = q - 1, L = q,   s0 = 1
/// Instances are immutable and safe to share across threads.
class ActivatingLoss {
 public:
  using Scalar = std::function<double(double)>;

  struct Constants {
    double alpha = 1.0;
    double holder_L = 1.0;
    std::optional<double> grad_bound;
    std::optional<double> stationary_s0;
    std::optional<double> q;
  };

  static ActivatingLoss least_squares();
  static ActivatingLoss logistic();
  /// q in (1, 2]; DomainError otherwise.
  static ActivatingLoss qnorm(double q);
  /// User-supplied loss. Only alpha in (0, 1] and L > 0 are checked here; the
  /// remaining axioms are checked empirically by verify_loss().
  static ActivatingLoss custom(std::string name, Scalar phi, Scalar dphi, Constants constants);

  /// phi(s). DomainError on non-finite s.
  double eval(double s) const;
  /// phi'(s). DomainError on non-finite s.
  double grad(double s) const;

  const std::string& name() const { return name_; }
  double alpha() const { return constants_.alpha; }
  double holder_L() const { return constants_.holder_L; }
  std::optional<double> grad_bound() const { return constants_.grad_bound; }
  std::optional<double> stationary_s0() const { return constants_.stationary_s0; }
  std::optional<double> q() const { return constants_.q; }
  const Constants& constants() const { return constants_; }
  bool is_one_activating() const { return constants_.alpha == 1.0; }

 private:
  enum class Family { LeastSquares, Logistic, QNorm, Custom };

  ActivatingLoss(Family family, std::string name, Constants constants)
      : family_(family), name_(std::move(name)), constants_(constants) {}

  Family family_;
  std::string name_;
  Constants constants_;
  Scalar phi_;
  Scalar dphi_;
};

/// Built-in loss by name ("least_squares", "logistic", "qnorm"). UsageError for
/// unknown names, a missing q for qnorm, or q outside (1, 2].
ActivatingLoss make_loss(const std::string& name, std::optional<double> q = std::nullopt);

/// Signed slacks of the four convexity/smoothness inequalities; each is >= 0
/// when the inequality holds.
///   a  L/(1+a)|s-t|^{1+a} - [phi(s) - phi(t) - phi'(t)(s-t)]
///   b  phi(t) - phi(s) - phi'(s)(t-s) - (a L^{-1/a}/(1+a)) |phi'(s)-phi'(t)|^{(1+a)/a}
///   c  (phi'(s)-phi'(t))(s-t) - (2a L^{-1/a}/(1+a)) |phi'(s)-phi'(t)|^{(1+a)/a}
///   d  ((1+a)^{1+1/a}/a) L^{1/a} phi(s) - |phi'(s)|^{(1+a)/a}
/// The exponent (1+a)/a grows like 1/a: for alpha near 0 the powers overflow,
/// so qnorm below q = 1.1 is not meaningfully checkable in double precision.
struct Prop1Report {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double min_residual() const;
  bool holds(double tolerance) const { return min_residual() >= -tolerance; }
};

Prop1Report check_proposition1(const ActivatingLoss& loss, double s, double s_tilde);

/// Norm-growth constant of a 1-activating loss: sqrt(L) s0 when phi' has a
/// zero s0, sqrt(2 phi(0) + 2 phi'(0)^2 / L) otherwise.
/// UnsupportedLossError unless alpha == 1.
double c_phi(const ActivatingLoss& loss);

/// sup_s [4 phi'(s)^2 k - 2 phi'(s) s] for k = gamma * kappa_tilde^2, found by
/// a 10^5-point grid on [-50, 50] followed by golden-section refinement around
/// the best grid cell. The supremum is bounded by c_phi(loss)^2 whenever
/// k <= 1/(4L). PreconditionError when k > 1/(4L) or k < 0,
/// UnsupportedLossError unless alpha == 1.
double sup_quadratic_bound(const ActivatingLoss& loss, double step_kappa_sq);

/// (a ln x, nu x + a ln(a / (nu e))); the first never exceeds the second.
/// DomainError unless all arguments are > 0.
std::pair<double, double> log_linearization_bound(double x, double nu, double a);

/// Outcome of the empirical property battery run by verify_loss().
struct LossCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst observed slack (or error) for the check
  std::string detail;
};

struct LossBattery {
  std::string loss_name;
  std::vector<LossCheck> checks;
  bool passed() const;
};

struct BatteryOptions {
  std::size_t samples = 10000;
  double range = 10.0;
  std::uint64_t seed = 20240601;
  double fd_step = 1e-6;
  double fd_tolerance = 1e-5;
  double inequality_slack = 1e-9;
  double sup_slack = 1e-6;
  std::size_t sup_trials = 100;
};

/// Gradient consistency, Hoelder certificate, the four residuals above,
/// convexity, nonnegativity, phi'(0) < 0, the stationary-point branch, the
/// gradient bound (when declared) and, for alpha = 1, the sup bound.
LossBattery verify_loss(const ActivatingLoss& loss, const BatteryOptions& options = {});

}  // namespace okl
