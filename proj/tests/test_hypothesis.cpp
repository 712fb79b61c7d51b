#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "okl/errors.hpp"
#include "okl/hypothesis.hpp"
#include "okl/io.hpp"
#include "test_util.hpp"

using okl::DualExpansion;
using okl::Kernel;
using okl::PairExpansion;
using okl::PairKernel;
using V = std::vector<double>;

namespace {

const Kernel kGauss = Kernel::gaussian(0.5, 1.0);

struct Term {
  V u, v;
  double c;
};

double brute_pair_eval(const PairKernel& pk, const std::vector<Term>& terms, const V& u, const V& v) {
  double s = 0.0;
  for (const auto& t : terms) s += t.c * pk.eval(t.u, t.v, u, v);
  return s;
}

double brute_pair_sq_norm(const PairKernel& pk, const std::vector<Term>& terms) {
  double s = 0.0;
  for (const auto& a : terms)
    for (const auto& b : terms) s += a.c * b.c * pk.eval(a.u, a.v, b.u, b.v);
  return s;
}

}  // namespace

TEST(DualExpansion, Examples) {
  DualExpansion h(kGauss, 2);
  EXPECT_EQ(h.evaluate(V{0.3, 0.1}), 0.0);
  EXPECT_EQ(h.rkhs_norm(), 0.0);

  const V x1{0.2, -0.4};
  h.add_scaled_section(x1, 1.0);
  EXPECT_EQ(h.evaluate(x1), 1.0);
  EXPECT_EQ(h.rkhs_norm(), 1.0);

  // first least-squares step from zero with y = +1: coefficient -gamma phi'(0) = 2 gamma
  const double gamma = 0.3;
  DualExpansion g(kGauss, 2);
  g.add_scaled_section(x1, 2.0 * gamma);
  EXPECT_DOUBLE_EQ(g.evaluate(x1), 2.0 * gamma * kGauss.eval(x1, x1));

  DualExpansion lin(Kernel::linear(1.0), 2);
  lin.add_scaled_section(V{1, 0}, 3.0);
  lin.add_scaled_section(V{0, 1}, 4.0);
  EXPECT_DOUBLE_EQ(lin.rkhs_norm(), 5.0);
}

TEST(DualExpansion, AddSectionExamples) {
  DualExpansion h(kGauss, 2);
  const V x1{0.1, 0.2}, x2{-0.5, 0.3};
  h.add_scaled_section(x1, 0.7);
  h.add_scaled_section(x2, 0.0);
  EXPECT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.evaluate(x2), 0.7 * kGauss.eval(x1, x2));

  DualExpansion m(kGauss, 2, {.merge_duplicates = true, .track_norm = true});
  DualExpansion u(kGauss, 2);
  m.add_scaled_section(x1, 0.4);
  m.add_scaled_section(x1, -1.1);
  u.add_scaled_section(x1, 0.4);
  u.add_scaled_section(x1, -1.1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m.coefficients()[0], 0.4 - 1.1);
  EXPECT_EQ(u.size(), 2u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto p = okl::testing::random_in_ball(rng, 2, 1.0);
    EXPECT_NEAR(m.evaluate(p), u.evaluate(p), 1e-15);
  }
  EXPECT_NEAR(m.tracked_norm(), m.rkhs_norm(), 1e-12);
}

TEST(DualExpansion, Errors) {
  DualExpansion h(kGauss, 2);
  EXPECT_THROW(h.evaluate(V{1.0}), okl::ShapeError);
  EXPECT_THROW(h.add_scaled_section(V{1.0}, 1.0), okl::ShapeError);
  EXPECT_THROW(h.add_scaled_section(V{0.0, 0.0}, NAN), okl::DomainError);
  EXPECT_THROW(h.add_scaled_section(V{0.0, 0.0}, INFINITY), okl::DomainError);
  EXPECT_THROW(h.tracked_norm(), okl::StateError);
}

TEST(DualExpansion, Linearity) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  DualExpansion a(kGauss, 3), b(kGauss, 3), sum(kGauss, 3);
  for (int i = 0; i < 30; ++i) {
    const auto x = okl::testing::random_in_ball(rng, 3, 1.0);
    const double w = n(rng);
    (i % 2 ? a : b).add_scaled_section(x, w);
    sum.add_scaled_section(x, w);
  }
  for (int i = 0; i < 100; ++i) {
    const auto p = okl::testing::random_in_ball(rng, 3, 1.0);
    const double direct = sum.evaluate(p), split = a.evaluate(p) + b.evaluate(p);
    EXPECT_LE(std::abs(direct - split), 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(DualExpansion, ReproducingConsistency) {
  std::mt19937_64 rng(3);
  for (const auto& k : {kGauss, Kernel::linear(2.0), Kernel::polynomial(3, 0.5, 1.0)}) {
    for (int i = 0; i < 50; ++i) {
      const auto x = okl::testing::random_in_ball(rng, 2, k.domain_radius());
      const double c = std::normal_distribution<double>()(rng);
      DualExpansion h(k, 2);
      h.add_scaled_section(x, c);
      const double expected = std::abs(c) * std::sqrt(k.eval(x, x));
      EXPECT_LE(std::abs(h.rkhs_norm() - expected), 1e-12 * std::max(expected, 1e-300));
    }
  }
}

TEST(DualExpansion, CauchySchwarz) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (const auto& k : {kGauss, Kernel::linear(1.5), Kernel::polynomial(2, 1.0, 1.0)}) {
    for (int rep = 0; rep < 20; ++rep) {
      DualExpansion h(k, 2);
      for (int i = 0; i < 15; ++i) h.add_scaled_section(okl::testing::random_in_ball(rng, 2, k.domain_radius()), n(rng));
      const double bound = h.rkhs_norm() * k.kappa();
      for (int i = 0; i < 100; ++i)
        ASSERT_LE(std::abs(h.evaluate(okl::testing::random_in_ball(rng, 2, k.domain_radius()))), bound + 1e-9);
    }
  }
}

TEST(DualExpansion, TrackedNormFollowsExactNorm) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (bool merge : {false, true}) {
    DualExpansion h(kGauss, 2, {.merge_duplicates = merge, .track_norm = true});
    std::vector<V> pool;
    for (int i = 0; i < 10; ++i) pool.push_back(okl::testing::random_in_ball(rng, 2, 1.0));
    for (int i = 0; i < 200; ++i) {
      const auto& x = pool[static_cast<std::size_t>(i) % pool.size()];
      if (i % 3 == 0) {
        h.add_scaled_section(x, n(rng), h.evaluate(x));
      } else {
        h.add_scaled_section(x, n(rng));
      }
      ASSERT_NEAR(h.tracked_norm(), h.rkhs_norm(), 1e-9 * std::max(1.0, h.rkhs_norm()));
    }
    EXPECT_EQ(h.size(), merge ? 10u : 200u);
  }
}

TEST(DualExpansion, SquaredNormMatchesQuadraticForm) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  DualExpansion h(kGauss, 2);
  std::vector<V> xs;
  V cs;
  for (int i = 0; i < 25; ++i) {
    xs.push_back(okl::testing::random_in_ball(rng, 2, 1.0));
    cs.push_back(n(rng));
    h.add_scaled_section(xs.back(), cs.back());
  }
  double q = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) q += cs[i] * cs[j] * kGauss.eval(xs[i], xs[j]);
  EXPECT_NEAR(h.squared_norm(), q, 1e-12 * q);
  EXPECT_GE(q, -1e-8 * h.squared_norm());
}

TEST(QuadraticFormClamp, ToleranceBand) {
  EXPECT_EQ(okl::clamp_quadratic_form(2.5, 1.0), 2.5);
  EXPECT_EQ(okl::clamp_quadratic_form(-1e-9, 1.0), 0.0);
  EXPECT_EQ(okl::clamp_quadratic_form(-0.5e-6, 1.0), 0.0);
  EXPECT_THROW(okl::clamp_quadratic_form(-1e-3, 1.0), okl::NumericalPsdError);
}

TEST(PairExpansion, EvaluateMatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  const PairKernel pk(kGauss);
  PairExpansion f(pk, 2);
  std::vector<Term> terms;
  std::vector<V> pool;
  for (int i = 0; i < 8; ++i) pool.push_back(okl::testing::random_in_ball(rng, 2, 1.0));
  for (int i = 0; i < 40; ++i) {
    const auto& u = pool[rng() % pool.size()];
    const auto& v = pool[rng() % pool.size()];
    const double c = n(rng);
    f.add_scaled_section(u, v, c);
    terms.push_back({u, v, c});
  }
  for (int i = 0; i < 50; ++i) {
    const auto u = okl::testing::random_in_ball(rng, 2, 1.0);
    const auto v = okl::testing::random_in_ball(rng, 2, 1.0);
    EXPECT_NEAR(f.evaluate(u, v), brute_pair_eval(pk, terms, u, v), 1e-12);
  }
  const double sq = brute_pair_sq_norm(pk, terms);
  EXPECT_NEAR(f.rkhs_norm_termwise(), std::sqrt(sq), 1e-10);
  EXPECT_NEAR(f.rkhs_norm_dense(), std::sqrt(sq), 1e-10);
  EXPECT_NEAR(f.rkhs_norm(), std::sqrt(sq), 1e-10);
  EXPECT_THROW(f.evaluate(V{0.0}, V{0.0, 0.0}), okl::ShapeError);
}

TEST(PairExpansion, EmptyAndZeroWeight) {
  PairExpansion f(PairKernel(kGauss), 2);
  EXPECT_EQ(f.evaluate(V{0.1, 0.1}, V{0.2, 0.2}), 0.0);
  EXPECT_EQ(f.rkhs_norm(), 0.0);
  f.add_scaled_section(V{0.1, 0.1}, V{0.2, 0.2}, 0.0);
  EXPECT_EQ(f.num_terms(), 0u);
  EXPECT_THROW(f.add_scaled_section(V{0.1, 0.1}, V{0.2, 0.2}, NAN), okl::DomainError);
  EXPECT_THROW(f.tracked_norm(), okl::StateError);
}

TEST(PairExpansion, MergingFoldsRepeatedPairs) {
  PairExpansion f(PairKernel(kGauss), 2, {.merge_duplicates = true, .track_norm = true});
  const V a{0.1, 0.3}, b{-0.2, 0.5};
  f.add_scaled_section(a, b, 0.25);
  f.add_scaled_section(a, b, 0.5);
  f.add_scaled_section(b, a, 1.0);
  EXPECT_EQ(f.num_points(), 2u);
  EXPECT_EQ(f.num_terms(), 2u);
  EXPECT_NEAR(f.evaluate(a, b), 0.75 + 1.0 * std::pow(kGauss.eval(a, b), 2), 1e-15);
  EXPECT_NEAR(f.tracked_norm(), f.rkhs_norm_termwise(), 1e-12);
}

TEST(PairExpansion, AnchorRowAndBlockAppends) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  const PairKernel pk(kGauss);
  PairExpansion f(pk, 3, {.merge_duplicates = false, .track_norm = true});
  std::vector<Term> terms;
  for (int t = 0; t < 25; ++t) {
    const auto x = okl::testing::random_in_ball(rng, 3, 1.0);
    const std::size_t anchor = f.add_point(x);
    const auto row = f.evaluate_anchor_row(anchor);
    ASSERT_EQ(row.size(), f.num_points());
    for (std::size_t j = 0; j < f.num_points(); ++j)
      ASSERT_NEAR(row[j], f.evaluate(x, f.points().point(j)), 1e-12);
    std::vector<std::size_t> partners;
    V weights;
    for (std::size_t j = 0; j < anchor; ++j) {
      partners.push_back(j);
      weights.push_back(j % 3 == 0 ? 0.0 : n(rng));
      if (weights.back() != 0.0) terms.push_back({x, f.points().point(j), weights.back()});
    }
    f.append_block(anchor, partners, weights, row);
    ASSERT_NEAR(f.tracked_norm(), std::sqrt(brute_pair_sq_norm(pk, terms)), 1e-9);
  }
  EXPECT_EQ(f.num_terms(), terms.size());
  const auto anchor_row = f.evaluate_anchor_row(0);
  std::vector<std::size_t> bad{f.num_points()};
  V w{1.0};
  EXPECT_THROW(f.append_block(0, bad, w, anchor_row), okl::ShapeError);
}

TEST(PairExpansion, DenseCoefficientsAggregate) {
  PairExpansion f(PairKernel(kGauss), 1);
  const auto i = f.add_point(V{0.1});
  const auto j = f.add_point(V{0.7});
  f.add_indexed_section(i, j, 1.5);
  f.add_indexed_section(i, j, 0.5);
  f.add_indexed_section(j, j, -2.0);
  const auto c = f.dense_coefficients();
  EXPECT_EQ(c(i, j), 2.0);
  EXPECT_EQ(c(j, j), -2.0);
  EXPECT_EQ(c(j, i), 0.0);
  EXPECT_EQ(f.gram(i, j), kGauss.eval(V{0.1}, V{0.7}));
  EXPECT_THROW(f.add_indexed_section(0, 5, 1.0), okl::ShapeError);
}

TEST(ExpansionRecords, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  DualExpansion h(kGauss, 3);
  for (int i = 0; i < 20; ++i) h.add_scaled_section(okl::testing::random_in_ball(rng, 3, 1.0), n(rng));
  const auto back = okl::parse_expansion_records(okl::expansion_records(h), kGauss);
  EXPECT_EQ(back.centers(), h.centers());
  EXPECT_TRUE(std::equal(back.coefficients().begin(), back.coefficients().end(), h.coefficients().begin(),
                         h.coefficients().end()));

  PairExpansion f(PairKernel(kGauss), 2);
  for (int i = 0; i < 20; ++i)
    f.add_scaled_section(okl::testing::random_in_ball(rng, 2, 1.0), okl::testing::random_in_ball(rng, 2, 1.0), n(rng));
  const auto fb = okl::parse_pair_expansion_records(okl::expansion_records(f), PairKernel(kGauss));
  for (int i = 0; i < 20; ++i) {
    const auto u = okl::testing::random_in_ball(rng, 2, 1.0), v = okl::testing::random_in_ball(rng, 2, 1.0);
    EXPECT_NEAR(fb.evaluate(u, v), f.evaluate(u, v), 1e-14);
  }
  EXPECT_THROW(okl::parse_expansion_records("x0,coefficient\n1.0,abc\n", kGauss), okl::DataError);
  EXPECT_THROW(okl::parse_expansion_records("", kGauss), okl::DataError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(okl::format_double(v)), v);
  }
  EXPECT_EQ(okl::format_double(0.5), "0.5");
}
