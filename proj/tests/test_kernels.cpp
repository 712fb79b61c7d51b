#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "okl/errors.hpp"
#include "okl/kernels.hpp"
#include "test_util.hpp"

using okl::Kernel;
using okl::PairKernel;
using okl::PointTable;
using V = std::vector<double>;

namespace {

std::vector<Kernel> kernel_zoo(double radius) {
  return {Kernel::gaussian(0.5, radius), Kernel::gaussian(2.0, radius), Kernel::linear(radius),
          Kernel::polynomial(3, 1.0, radius), Kernel::polynomial(2, 0.0, radius)};
}

Eigen::MatrixXd to_eigen(const okl::Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

void expect_psd(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const auto& ev = es.eigenvalues();
  EXPECT_GE(ev.minCoeff(), -1e-8 * std::max(ev.maxCoeff(), 0.0));
}

}  // namespace

TEST(KernelEval, Examples) {
  const auto g = Kernel::gaussian(1.0, 1.0);
  EXPECT_EQ(g.eval(V{0.3, -0.2}, V{0.3, -0.2}), 1.0);
  EXPECT_EQ(Kernel::linear(1.0).eval(V{1, 0}, V{0, 1}), 0.0);
  EXPECT_NEAR(g.eval(V{0.0}, V{2.0}), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(g.eval(V{0.0}, V{2.0}), 0.135335, 1e-6);
  EXPECT_NEAR(Kernel::polynomial(2, 1.0, 1.0).eval(V{1, 2}, V{3, 4}), 144.0, 1e-12);
}

TEST(KernelEval, ShapeAndParameterErrors) {
  EXPECT_THROW(Kernel::gaussian(1.0, 1.0).eval(V{1.0}, V{1.0, 2.0}), okl::ShapeError);
  EXPECT_THROW(Kernel::gaussian(0.0, 1.0), okl::DomainError);
  EXPECT_THROW(Kernel::linear(-1.0), okl::DomainError);
  EXPECT_THROW(Kernel::polynomial(0, 1.0, 1.0), okl::DomainError);
  EXPECT_THROW(Kernel::polynomial(2, -1.0, 1.0), okl::DomainError);
  PointTable t(2);
  EXPECT_THROW(t.push_back(V{1.0}), okl::ShapeError);
  EXPECT_THROW(t.push_back(V{1.0, NAN}), okl::DomainError);
}

TEST(PairKernelEval, Examples) {
  const PairKernel pg(Kernel::gaussian(1.0, 1.0));
  const V a{0.1, 0.2}, b{-0.3, 0.4};
  EXPECT_EQ(pg.eval(a, b, a, b), 1.0);
  const PairKernel pl(Kernel::linear(1.0));
  EXPECT_EQ(pl.eval(V{1, 0}, V{0, 1}, V{0, 1}, V{1, 0}), 0.0);
  EXPECT_NEAR(pg.eval(V{0.0}, V{0.0}, V{2.0}, V{0.0}), std::exp(-2.0) * 1.0, 1e-16);
  EXPECT_THROW(pg.eval(V{0.0}, V{0.0}, V{2.0, 1.0}, V{0.0}), okl::ShapeError);
}

TEST(Kappa, Examples) {
  EXPECT_EQ(Kernel::gaussian(0.7, 3.0).kappa(), 1.0);
  EXPECT_EQ(Kernel::linear(2.0).kappa(), 2.0);
  EXPECT_NEAR(Kernel::polynomial(3, 1.0, 2.0).kappa(), std::pow(5.0, 1.5), 1e-12);
  EXPECT_EQ(PairKernel(Kernel::gaussian(0.5, 1.0)).kappa_tilde(), 1.0);
  EXPECT_EQ(PairKernel(Kernel::linear(2.0)).kappa_tilde(), 4.0);
}

TEST(Gram, Examples) {
  PointTable one(2);
  one.push_back(V{0.5, 0.5});
  const auto g1 = okl::gram(Kernel::gaussian(1.0, 1.0), one);
  ASSERT_EQ(g1.rows, 1u);
  EXPECT_EQ(g1(0, 0), 1.0);

  PointTable two(2);
  two.push_back(V{1, 0});
  two.push_back(V{0, 1});
  const auto g2 = okl::gram(Kernel::linear(1.0), two);
  EXPECT_EQ(g2.data, (V{1, 0, 0, 1}));

  EXPECT_THROW(okl::gram(Kernel::linear(1.0), PointTable(2)), okl::DataError);
}

TEST(Gram, PermutationRelabelsRowsAndColumns) {
  std::mt19937_64 rng(7);
  for (const auto& k : kernel_zoo(1.0)) {
    const auto pts = okl::testing::random_table(rng, 9, 3, 1.0);
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PointTable permuted(3);
    for (auto i : perm) permuted.push_back(pts.point(i));
    const auto g = okl::gram(k, pts);
    const auto gp = okl::gram(k, permuted);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j) EXPECT_EQ(gp(i, j), g(perm[i], perm[j]));
  }
}

TEST(KernelProperties, SymmetryIsBitExact) {
  std::mt19937_64 rng(8);
  for (const auto& k : kernel_zoo(2.0)) {
    for (int i = 0; i < 2000; ++i) {
      const auto x = okl::testing::random_in_ball(rng, 4, 2.0);
      const auto y = okl::testing::random_in_ball(rng, 4, 2.0);
      ASSERT_EQ(k.eval(x, y), k.eval(y, x));
    }
  }
}

TEST(KernelProperties, GramIsPositiveSemidefinite) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> size(1, 20);
  for (const auto& k : kernel_zoo(1.0)) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto pts = okl::testing::random_table(rng, size(rng), 3, 1.0);
      expect_psd(to_eigen(okl::gram(k, pts)));
    }
  }
}

TEST(KernelProperties, DiagonalBoundedByKappaSquared) {
  std::mt19937_64 rng(10);
  for (double radius : {0.5, 1.0, 3.0}) {
    for (const auto& k : kernel_zoo(radius)) {
      const double k2 = k.kappa() * k.kappa();
      for (int i = 0; i < 10000; ++i) {
        const auto x = okl::testing::random_in_ball(rng, 3, radius);
        ASSERT_LE(k.eval(x, x), k2 + 1e-12 * std::max(1.0, k2));
      }
    }
  }
}

TEST(KernelProperties, PairGramIsPositiveSemidefinite) {
  std::mt19937_64 rng(11);
  for (const auto& base : kernel_zoo(1.0)) {
    const PairKernel pk(base);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t n = 1 + rep % 15;
      std::vector<std::pair<V, V>> pairs;
      for (std::size_t i = 0; i < n; ++i)
        pairs.emplace_back(okl::testing::random_in_ball(rng, 2, 1.0), okl::testing::random_in_ball(rng, 2, 1.0));
      Eigen::MatrixXd g(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          g(i, j) = pk.eval(pairs[i].first, pairs[i].second, pairs[j].first, pairs[j].second);
      EXPECT_EQ((g - g.transpose()).norm(), 0.0);
      expect_psd(g);
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::sqrt(g(i, i)), pk.kappa_tilde() + 1e-12);
    }
  }
}

TEST(KernelRow, MatchesPointwiseEvaluation) {
  std::mt19937_64 rng(12);
  for (const auto& k : kernel_zoo(1.0)) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u}) {
      const auto pts = okl::testing::random_table(rng, n, 3, 1.0);
      const auto x = okl::testing::random_in_ball(rng, 3, 1.0);
      const auto row = k.row(pts, x);
      ASSERT_EQ(row.size(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(row[i], k.eval(pts.point(i), x), 1e-14);
    }
  }
}
