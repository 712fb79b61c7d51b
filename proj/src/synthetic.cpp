#include "okl/synthetic.hpp"

#include <cmath>
#include <sstream>

#include "okl/errors.hpp"

namespace okl {

double Link::eta(double h) const {
  switch (kind) {
    case Kind::Logistic:
      return h >= 0.0 ? 1.0 / (1.0 + std::exp(-h)) : std::exp(h) / (1.0 + std::exp(h));
    case Kind::Affine:
      return 0.5 * (1.0 + h);
    case Kind::Power:
      return 1.0 / (1.0 + std::pow((1.0 - h) / (1.0 + h), exponent));
  }
  return 0.5;
}

std::string Link::name() const {
  switch (kind) {
    case Kind::Logistic: return "logistic";
    case Kind::Affine: return "affine";
    case Kind::Power: {
      std::ostringstream s;
      s << "power(" << exponent << ")";
      return s.str();
    }
  }
  return "unknown";
}

Link matching_link(const ActivatingLoss& loss) {
  if (loss.name() == "least_squares") return {Link::Kind::Affine, 1.0};
  if (loss.name() == "qnorm" && loss.q()) {
    if (*loss.q() == 2.0) return {Link::Kind::Affine, 1.0};
    return {Link::Kind::Power, *loss.q() - 1.0};
  }
  return {Link::Kind::Logistic, 1.0};
}

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

namespace {

std::vector<double> uniform_in_ball(std::mt19937_64& rng, std::size_t dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(norm2);
  for (double& v : x) v *= r;
  return x;
}

}  // namespace

SyntheticDistribution::SyntheticDistribution(const Kernel& kernel, const DistributionParams& params)
    : radius_(kernel.domain_radius()), link_(params.link), planted_(kernel, params.dim) {
  if (params.centers == 0) throw ConfigError("the planted expansion needs at least one center");
  if (!(params.amplitude > 0.0)) throw ConfigError("planted amplitude must be positive");
  if (link_.kind == Link::Kind::Power && !(link_.exponent > 0.0))
    throw ConfigError("power link exponent must be positive");
  auto rng = make_engine(params.seed);
  std::normal_distribution<double> normal(0.0, params.amplitude);
  std::vector<std::vector<double>> centers;
  std::vector<double> coefs;
  for (std::size_t i = 0; i < params.centers; ++i) {
    centers.push_back(uniform_in_ball(rng, params.dim, radius_));
    coefs.push_back(normal(rng));
  }
  if (link_.bounded()) {
    double l1 = 0.0;
    for (double a : coefs) l1 += std::abs(a);
    const double k2 = kernel.kappa() * kernel.kappa();
    const double cap = 0.9 / k2;
    if (l1 > cap) {
      for (double& a : coefs) a *= cap / l1;
    }
  }
  for (std::size_t i = 0; i < centers.size(); ++i) planted_.add_scaled_section(centers[i], coefs[i]);
}

std::vector<double> SyntheticDistribution::sample_point(std::mt19937_64& rng) const {
  return uniform_in_ball(rng, dim(), radius_);
}

LabeledExample SyntheticDistribution::sample(std::mt19937_64& rng) const {
  LabeledExample z;
  z.x = sample_point(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  z.y = unif(rng) < eta(z.x) ? 1 : -1;
  return z;
}

EvalSet EvalSet::draw(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed) {
  EvalSet e;
  e.points = PointTable(dist.dim());
  e.points.reserve(n);
  e.seed = seed;
  auto rng = make_engine(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = dist.sample(rng);
    e.points.push_back(z.x);
    e.labels.push_back(z.y);
    e.eta.push_back(dist.eta(z.x));
  }
  return e;
}

EvalSet EvalSet::from_examples(const std::vector<LabeledExample>& examples, std::size_t dim) {
  EvalSet e;
  e.points = PointTable(dim);
  for (const auto& z : examples) {
    check_label(z.y);
    e.points.push_back(z.x);
    e.labels.push_back(z.y);
  }
  return e;
}

double bayes_score(const ActivatingLoss& loss, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("conditional probability must lie in (0, 1)");
  if (loss.name() == "logistic") return std::log(eta) - std::log1p(-eta);
  if (loss.name() == "least_squares") return 2.0 * eta - 1.0;
  if (loss.name() == "qnorm" && loss.q()) {
    const double r = std::pow((1.0 - eta) / eta, 1.0 / (*loss.q() - 1.0));
    return (1.0 - r) / (1.0 + r);
  }
  throw UnsupportedLossError("no closed-form minimizer for loss '" + loss.name() + "'");
}

double bayes_pair_score(const ActivatingLoss& loss, double eta_first, double eta_second) {
  const double p = eta_first * (1.0 - eta_second);
  const double q = (1.0 - eta_first) * eta_second;
  return 0.5 * bayes_score(loss, p / (p + q));
}

}  // namespace okl
