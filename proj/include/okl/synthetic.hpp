#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "okl/hypothesis.hpp"
#include "okl/kernels.hpp"
#include "okl/losses.hpp"
#include "okl/trainers.hpp"

namespace okl {

/// How the planted expansion h sets eta(x) = P(y = +1 | x).
///   logistic  1 / (1 + e^{-h})
///   affine    (1 + h) / 2, with ||h||_inf < 1 enforced by scaling
///   power(p)  1 / (1 + ((1 - h)/(1 + h))^p), ||h||_inf < 1; p = 1 is affine
/// Each link makes h the exact pointwise risk minimizer of one loss family:
/// logistic for the logistic loss, power(q - 1) for qnorm(q), affine for least squares.
struct Link {
  enum class Kind { Logistic, Affine, Power };
  Kind kind = Kind::Logistic;
  double exponent = 1.0;  // power link only

  double eta(double h) const;
  std::string name() const;
  bool bounded() const { return kind != Kind::Logistic; }
  friend bool operator==(const Link&, const Link&) = default;
};

/// The link under which h minimizes the given loss (custom losses: logistic).
Link matching_link(const ActivatingLoss& loss);

/// Generates a deterministic engine from a 64-bit seed.
std::mt19937_64 make_engine(std::uint64_t seed);

struct DistributionParams {
  std::size_t dim = 2;
  std::size_t centers = 10;
  double amplitude = 1.5;
  std::uint64_t seed = 1;
  Link link;
};

/// x uniform on the ball of the kernel's domain radius; y drawn from eta(h(x)).
class SyntheticDistribution {
 public:
  /// Plants h = sum_i a_i G(c_i, .) with centers uniform on the ball and
  /// a_i ~ N(0, amplitude^2). For bounded links the coefficients are rescaled so
  /// that sum |a_i| kappa^2 <= 0.9, which keeps |h| <= 0.9 on the domain.
  SyntheticDistribution(const Kernel& kernel, const DistributionParams& params);

  std::size_t dim() const { return planted_.dim(); }
  double radius() const { return radius_; }
  const DualExpansion& planted() const { return planted_; }
  const Link& link() const { return link_; }

  std::vector<double> sample_point(std::mt19937_64& rng) const;
  LabeledExample sample(std::mt19937_64& rng) const;
  double eta(std::span<const double> x) const { return link_.eta(planted_.evaluate(x)); }

 private:
  double radius_;
  Link link_;
  DualExpansion planted_;
};

/// Infinite i.i.d. stream from a distribution.
class SampledSource final : public ExampleSource {
 public:
  SampledSource(const SyntheticDistribution& dist, std::uint64_t seed)
      : dist_(&dist), rng_(make_engine(seed)) {}
  std::optional<LabeledExample> next() override { return dist_->sample(rng_); }

 private:
  const SyntheticDistribution* dist_;
  std::mt19937_64 rng_;
};

/// Fixed labeled sample shared read-only by every run of a study. eta holds
/// the conditional probability at each point (known for planted data).
struct EvalSet {
  PointTable points{1};
  std::vector<int> labels;
  std::vector<double> eta;
  std::uint64_t seed = 0;

  std::size_t size() const { return labels.size(); }
  static EvalSet draw(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed);
  /// Labeled points without conditional probabilities.
  static EvalSet from_examples(const std::vector<LabeledExample>& examples, std::size_t dim);
};

/// argmin_s [eta phi(s) + (1 - eta) phi(-s)] for the built-in families:
/// log-odds (logistic), 2 eta - 1 (least squares), the qnorm balance point.
/// UnsupportedLossError for custom losses.
double bayes_score(const ActivatingLoss& loss, double eta);

/// The pairwise counterpart: argmin_f [p phi(2f) + q phi(-2f)] with
/// p = eta(1 - eta'), q = (1 - eta) eta'.
double bayes_pair_score(const ActivatingLoss& loss, double eta_first, double eta_second);

}  // namespace okl
