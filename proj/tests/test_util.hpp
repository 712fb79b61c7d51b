#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "okl/point_table.hpp"
#include "okl/trainers.hpp"

namespace okl::testing {

inline std::vector<double> random_in_ball(std::mt19937_64& rng, std::size_t dim, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> x(dim);
  double n2 = 0.0;
  for (auto& v : x) {
    v = normal(rng);
    n2 += v * v;
  }
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(n2);
  for (auto& v : x) v *= r;
  return x;
}

inline PointTable random_table(std::mt19937_64& rng, std::size_t n, std::size_t dim, double radius) {
  PointTable t(dim);
  for (std::size_t i = 0; i < n; ++i) t.push_back(random_in_ball(rng, dim, radius));
  return t;
}

inline std::vector<LabeledExample> random_examples(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                                   double radius) {
  std::bernoulli_distribution coin(0.5);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({random_in_ball(rng, dim, radius), coin(rng) ? 1 : -1});
  return out;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace okl::testing
