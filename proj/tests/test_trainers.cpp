#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "okl/errors.hpp"
#include "okl/io.hpp"
#include "okl/schedule.hpp"
#include "okl/synthetic.hpp"
#include "okl/trainers.hpp"
#include "test_util.hpp"

using namespace okl;
using V = std::vector<double>;

namespace {

const Kernel kGauss = Kernel::gaussian(0.5, 1.0);

struct NaivePointwise {
  std::vector<V> centers;
  V coefs;
  double eval(const Kernel& k, const V& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) s += coefs[i] * k.eval(centers[i], x);
    return s;
  }
};

NaivePointwise naive_pointwise(const std::vector<LabeledExample>& data, const StepSchedule& s,
                               const ActivatingLoss& loss, const Kernel& k) {
  NaivePointwise h;
  for (std::size_t t = 1; t <= data.size(); ++t) {
    const auto& z = data[t - 1];
    const double pred = h.eval(k, z.x);
    const double c = -s.gamma(t) * loss.grad(z.y * pred) * z.y;
    // a zero coefficient leaves g unchanged and is not stored
    if (c == 0.0) continue;
    h.centers.push_back(z.x);
    h.coefs.push_back(c);
  }
  return h;
}

struct PairTerm {
  V u, v;
  double c;
};

struct NaivePairwise {
  std::vector<PairTerm> terms;
  double eval(const PairKernel& k, const V& u, const V& v) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.c * k.eval(t.u, t.v, u, v);
    return s;
  }
};

NaivePairwise naive_pairwise(const std::vector<LabeledExample>& data, const StepSchedule& s,
                             const ActivatingLoss& loss, const PairKernel& k) {
  NaivePairwise f;
  for (std::size_t t = 2; t <= data.size(); ++t) {
    const auto& zt = data[t - 1];
    std::vector<PairTerm> fresh;
    for (std::size_t j = 1; j < t; ++j) {
      const auto& zj = data[j - 1];
      const double dy = zt.y - zj.y;
      if (dy == 0.0) continue;
      const double val = f.eval(k, zt.x, zj.x);
      fresh.push_back({zt.x, zj.x, -s.gamma(t) / static_cast<double>(t - 1) * loss.grad(dy * val) * dy});
    }
    f.terms.insert(f.terms.end(), fresh.begin(), fresh.end());
  }
  return f;
}

double sum_gamma(const StepSchedule& s, std::size_t from, std::size_t to) {
  long double acc = 0.0L;
  for (std::size_t j = from; j <= to; ++j)
    acc += static_cast<long double>(s.c()) * std::pow(static_cast<long double>(j), -static_cast<long double>(s.theta()));
  return static_cast<double>(acc);
}

}  // namespace

TEST(StepSchedule, ValuesAndErrors) {
  const StepSchedule s(0.5, 0.75);
  EXPECT_EQ(s.gamma(1), 0.5);
  EXPECT_DOUBLE_EQ(s.gamma(16), 0.5 / 8.0);
  EXPECT_THROW(s.gamma(0), DomainError);
  EXPECT_THROW(StepSchedule(0.0, 0.5), DomainError);
  EXPECT_THROW(StepSchedule(1.0, 0.0), DomainError);
  EXPECT_THROW(StepSchedule(NAN, 0.5), DomainError);
}

TEST(StepSchedule, StrictlyDecreasing) {
  for (double theta : {0.3, 0.5, 2.0 / 3.0, 0.75, 0.99, 1.5}) {
    const StepSchedule s(0.7, theta);
    double prev = s.gamma(1);
    for (std::size_t t = 2; t <= 100000; ++t) {
      const double g = s.gamma(t);
      ASSERT_GT(g, 0.0);
      ASSERT_LT(g, prev) << "theta=" << theta << " t=" << t;
      prev = g;
    }
  }
}

TEST(Validator, Examples) {
  const auto logistic = ActivatingLoss::logistic();
  const auto r = validate_schedule(StepSchedule(0.5, 2.0 / 3.0), logistic);
  EXPECT_TRUE(r.theorem2_valid);
  EXPECT_NEAR(r.exponent_thm2, 1.0 / 3.0, 1e-15);
  // maximal-rate recipe theta = 2 / (alpha + 2)
  const double alpha = 1.0, theta = 2.0 / (alpha + 2.0);
  EXPECT_NEAR(validate_schedule(StepSchedule(0.5, theta), logistic).exponent_thm2, alpha / (alpha + 2.0), 1e-15);
  EXPECT_FALSE(validate_schedule(StepSchedule(0.5, 0.6), ActivatingLoss::qnorm(1.5)).theorem2_valid);
}

struct ValidatorCase {
  const char* label;
  ActivatingLoss loss;
  double c, theta;
  bool with_pair_kernel;
  bool square_summable, diverges, thm2, thm3_c, thm3_theta;
};

TEST(Validator, BoundaryTable) {
  const auto lg = ActivatingLoss::logistic();
  const auto ls = ActivatingLoss::least_squares();
  const auto q15 = ActivatingLoss::qnorm(1.5);
  const std::vector<ValidatorCase> table = {
      {"a1 theta 1/2", lg, 0.5, 0.5, false, false, true, false, false, false},
      {"a1 theta .51", lg, 0.5, 0.51, false, true, true, true, false, true},
      {"a1 theta .99", lg, 0.5, 0.99, false, true, true, true, false, true},
      {"a1 theta 1", lg, 0.5, 1.0, false, true, true, false, false, false},
      {"a1 theta 1.01", lg, 0.5, 1.01, false, true, false, false, false, false},
      {"a.5 theta .6", q15, 0.5, 0.6, false, false, true, false, false, true},
      {"a.5 theta .66", q15, 0.5, 0.66, false, false, true, false, false, true},
      {"a.5 theta .67", q15, 0.5, 0.67, false, true, true, true, false, true},
      {"logistic c at bound", lg, 1.0, 0.75, true, true, true, true, true, true},
      {"logistic c above", lg, 1.0001, 0.75, true, true, true, true, false, true},
      {"logistic c below", lg, 0.9999, 0.75, true, true, true, true, true, true},
      {"ls c at bound", ls, 0.125, 0.75, true, true, true, true, true, true},
      {"ls c above", ls, 0.1251, 0.75, true, true, true, true, false, true},
      {"pair theta 1/2", lg, 0.5, 0.5, true, false, true, false, true, false},
      {"pair theta .51", lg, 0.5, 0.51, true, true, true, true, true, true},
      {"pair theta 1", lg, 0.5, 1.0, true, true, true, false, true, false},
  };
  const PairKernel pk(kGauss);
  for (const auto& tc : table) {
    const auto r = validate_schedule(StepSchedule(tc.c, tc.theta), tc.loss,
                                     tc.with_pair_kernel ? std::optional<PairKernel>(pk) : std::nullopt);
    EXPECT_EQ(r.square_summable_1plusalpha, tc.square_summable) << tc.label;
    EXPECT_EQ(r.summable_diverges, tc.diverges) << tc.label;
    EXPECT_EQ(r.theorem2_valid, tc.thm2) << tc.label;
    EXPECT_EQ(r.pairwise_kernel_given, tc.with_pair_kernel) << tc.label;
    EXPECT_EQ(r.theorem3_c_ok, tc.thm3_c) << tc.label;
    EXPECT_EQ(r.theorem3_theta_ok, tc.thm3_theta) << tc.label;
  }
}

TEST(Validator, KappaTildeEntersStepConstraint) {
  const PairKernel pk(Kernel::linear(2.0));
  const auto r = validate_schedule(StepSchedule(1.0 / 16.0, 0.75), ActivatingLoss::logistic(), pk);
  EXPECT_EQ(r.kappa_tilde, 4.0);
  EXPECT_DOUBLE_EQ(*r.c_max, 1.0 / 16.0);
  EXPECT_TRUE(r.theorem3_c_ok);
  EXPECT_FALSE(validate_schedule(StepSchedule(0.07, 0.75), ActivatingLoss::logistic(), pk).theorem3_c_ok);
}

TEST(Validator, SmallAlphaPairwiseOutsideProvenRegime) {
  const auto r = validate_schedule(StepSchedule(0.1, 0.75), ActivatingLoss::qnorm(1.5), PairKernel(kGauss));
  EXPECT_FALSE(r.pairwise_proven_regime());
  EXPECT_TRUE(validate_schedule(StepSchedule(0.1, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss))
                  .pairwise_proven_regime());
}

TEST(Validator, ExponentFormulas) {
  const auto r = validate_schedule(StepSchedule(1.0, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss));
  EXPECT_NEAR(r.exponent_thm3(0.02), std::min(0.375 - 0.25 - 0.01, 0.25 - 0.02), 1e-15);
  EXPECT_NEAR(r.exponent_thm4(0.02), 0.1775, 1e-15);
  EXPECT_NEAR(r.exponent_thm2, std::min(0.375, 0.25), 1e-15);
}

TEST(NormEnvelope, Examples) {
  const auto ls = ActivatingLoss::least_squares();
  const StepSchedule s(0.1, 0.75);
  EXPECT_EQ(lemma4_envelope(s, ls, 1), 0.0);
  EXPECT_NEAR(lemma4_envelope(s, ls, 2), std::sqrt(2.0) * std::sqrt(0.1 * std::pow(2.0, -0.75)), 1e-15);
  EXPECT_THROW(lemma4_envelope(s, ActivatingLoss::qnorm(1.5), 5), UnsupportedLossError);
  EXPECT_THROW(lemma4_closed_form(StepSchedule(0.1, 1.0), ls, 5), DomainError);
}

TEST(NormEnvelope, VectorFormMatchesIndependentSum) {
  const auto lg = ActivatingLoss::logistic();
  const StepSchedule s(0.8, 0.6);
  const auto env = lemma4_envelopes(s, lg, 3000);
  ASSERT_EQ(env.size(), 3000u);
  const double cphi = std::sqrt(2.0 * std::log(2.0) + 2.0);
  for (std::size_t t : {1u, 2u, 3u, 10u, 999u, 3000u}) {
    const double oracle = cphi * std::sqrt(sum_gamma(s, 2, t));
    EXPECT_NEAR(env[t - 1], oracle, 1e-12 * std::max(1.0, oracle));
    EXPECT_NEAR(lemma4_envelope(s, lg, t), oracle, 1e-12 * std::max(1.0, oracle));
  }
}

TEST(NormEnvelope, ClosedFormDominatesExactSum) {
  for (const auto& loss : {ActivatingLoss::least_squares(), ActivatingLoss::logistic()}) {
    for (double c : {0.05, 0.125, 0.5, 1.0, 3.0}) {
      for (double theta : {0.51, 0.6, 0.75, 0.9, 0.99}) {
        const StepSchedule s(c, theta);
        const auto env = lemma4_envelopes(s, loss, 10000);
        for (std::size_t t = 2; t <= 10000; ++t) ASSERT_LE(env[t - 1], lemma4_closed_form(s, loss, t)) << c << " " << theta << " " << t;
      }
    }
  }
}

TEST(PartialSums, StayBelowClosedFormBound) {
  for (double alpha : {0.5, 0.8, 1.0}) {
    for (double c : {0.1, 0.5, 1.0, 2.0}) {
      for (double theta : {0.6, 0.7, 0.75, 0.9}) {
        if (theta * (1.0 + alpha) <= 1.0) continue;
        const StepSchedule s(c, theta);
        const double bound = power_sum_bound(s, alpha);
        EXPECT_NEAR(bound, 2.0 * std::pow(c, 1.0 + alpha) / (theta * (1.0 + alpha) - 1.0), 1e-14 * bound);
        const double partial = gamma_power_sum(s, 1.0 + alpha, 1, 1000000);
        EXPECT_LE(partial, bound * (1.0 + 1e-6)) << alpha << " " << c << " " << theta;
      }
    }
  }
  EXPECT_THROW(power_sum_bound(StepSchedule(1.0, 0.5), 1.0), DomainError);
  EXPECT_EQ(gamma_power_sum(StepSchedule(1.0, 0.5), 2.0, 5, 4), 0.0);
}

TEST(PartialSums, CompensatedSumMatchesLongDouble) {
  const StepSchedule s(0.9, 0.7);
  long double acc = 0.0L;
  for (std::size_t j = 1; j <= 200000; ++j) acc += std::pow(0.9L * std::pow(static_cast<long double>(j), -0.7L), 1.8L);
  EXPECT_NEAR(gamma_power_sum(s, 1.8, 1, 200000), static_cast<double>(acc), 1e-12 * static_cast<double>(acc));
}

TEST(PointwiseStep, Examples) {
  const double gamma = 0.3;
  const V x{0.2, 0.1};
  PointwiseTrainer ls(ActivatingLoss::least_squares(), kGauss, StepSchedule(gamma, 0.75), 2);
  const auto s1 = ls.step({x, +1});
  EXPECT_EQ(s1.t, 1u);
  EXPECT_EQ(s1.prediction, 0.0);
  EXPECT_DOUBLE_EQ(s1.coefficient, 2.0 * gamma);
  EXPECT_EQ(ls.t(), 2u);

  PointwiseTrainer lg(ActivatingLoss::logistic(), kGauss, StepSchedule(gamma, 0.75), 2);
  EXPECT_DOUBLE_EQ(lg.step({x, -1}).coefficient, -gamma / 2.0);

  EXPECT_THROW(lg.step({x, 0}), LabelError);
  EXPECT_THROW(lg.step({x, 1}, 0.0), DomainError);
}

TEST(PointwiseStep, ZeroGradientIsFixedPoint) {
  const V x{0.3, -0.3};
  PointwiseTrainer tr(ActivatingLoss::least_squares(), kGauss, StepSchedule(0.5, 0.75), 2);
  tr.step({x, +1}, 0.5);  // g(x) = 2 * 0.5 * G(x, x) = 1, the stationary point
  const auto before = tr.hypothesis();
  const auto s = tr.step({x, +1}, 0.3);
  EXPECT_EQ(s.prediction, 1.0);
  EXPECT_EQ(s.coefficient, 0.0);
  EXPECT_EQ(tr.hypothesis().size(), before.size());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto p = okl::testing::random_in_ball(rng, 2, 1.0);
    EXPECT_EQ(tr.hypothesis().evaluate(p), before.evaluate(p));
  }
}

TEST(PairwiseStep, Examples) {
  const V x1{0.1, 0.2}, x2{-0.3, 0.4};
  const StepSchedule sched(0.1, 0.75);
  PairwiseTrainer same(ActivatingLoss::least_squares(), PairKernel(kGauss), sched, 2);
  same.observe({x1, +1});
  EXPECT_EQ(same.observe({x2, +1}).terms_added, 0u);
  EXPECT_EQ(same.hypothesis().num_terms(), 0u);

  PairwiseTrainer tr(ActivatingLoss::least_squares(), PairKernel(kGauss), sched, 2);
  EXPECT_EQ(tr.t(), 1u);
  tr.observe_first({x1, -1});
  EXPECT_EQ(tr.t(), 2u);
  EXPECT_EQ(tr.history_size(), 1u);
  const auto s = tr.step({x2, +1});
  EXPECT_EQ(s.t, 2u);
  ASSERT_EQ(tr.hypothesis().num_terms(), 1u);
  EXPECT_DOUBLE_EQ(tr.hypothesis().coefficients()[0], 4.0 * sched.gamma(2));
  EXPECT_NEAR(tr.hypothesis().evaluate(x2, x1), 4.0 * sched.gamma(2), 1e-15);

  const V x3{0.5, -0.1};
  const auto s3 = tr.step({x3, -1});
  EXPECT_LE(s3.terms_added, 2u);
  const auto naive = naive_pairwise({{x1, -1}, {x2, +1}, {x3, -1}}, sched, ActivatingLoss::least_squares(), PairKernel(kGauss));
  ASSERT_EQ(naive.terms.size(), tr.hypothesis().num_terms());
  for (std::size_t k = 0; k < naive.terms.size(); ++k)
    EXPECT_NEAR(tr.hypothesis().coefficients()[k], naive.terms[k].c, 1e-15);
}

TEST(PairwiseStep, StateErrors) {
  PairwiseTrainer tr(ActivatingLoss::logistic(), PairKernel(kGauss), StepSchedule(1.0, 0.75), 2);
  EXPECT_THROW(tr.step({V{0.0, 0.0}, 1}), StateError);
  tr.observe_first({V{0.0, 0.0}, 1});
  EXPECT_THROW(tr.observe_first({V{0.0, 0.0}, 1}), StateError);
  EXPECT_THROW(tr.step({V{0.0, 0.0}, 2}), LabelError);
}

TEST(PairwiseStep, HistoryLengthIsTMinusOne) {
  std::mt19937_64 rng(2);
  PairwiseTrainer tr(ActivatingLoss::logistic(), PairKernel(kGauss), StepSchedule(1.0, 0.75), 2);
  for (const auto& z : okl::testing::random_examples(rng, 20, 2, 1.0)) {
    EXPECT_EQ(tr.history_size(), tr.t() - 1);
    tr.observe(z);
  }
  EXPECT_EQ(tr.history_size(), 20u);
}

TEST(ReplayOracle, PointwiseMatchesNaiveRecomputation) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = okl::testing::random_examples(rng, 30, 2, 1.0);
    const auto loss = rep % 2 ? ActivatingLoss::logistic() : ActivatingLoss::qnorm(1.5);
    const StepSchedule s(0.5, 0.75);
    VectorSource src(data);
    const auto run = run_pointwise(src, 30, s, loss, kGauss, 2);
    const auto naive = naive_pointwise(data, s, loss, kGauss);
    ASSERT_EQ(run.hypothesis.size(), naive.coefs.size());
    for (std::size_t i = 0; i < naive.coefs.size(); ++i)
      EXPECT_LE(std::abs(run.hypothesis.coefficients()[i] - naive.coefs[i]), 1e-12 * std::max(1.0, std::abs(naive.coefs[i])));
    for (int p = 0; p < 20; ++p) {
      const auto x = okl::testing::random_in_ball(rng, 2, 1.0);
      EXPECT_LE(std::abs(run.hypothesis.evaluate(x) - naive.eval(kGauss, x)), 1e-10);
    }
  }
}

TEST(ReplayOracle, PairwiseMatchesNaiveRecomputation) {
  std::mt19937_64 rng(4);
  const PairKernel pk(kGauss);
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = okl::testing::random_examples(rng, 15, 2, 1.0);
    const auto loss = rep % 2 ? ActivatingLoss::logistic() : ActivatingLoss::least_squares();
    const StepSchedule s(rep % 2 ? 1.0 : 0.125, 0.75);
    VectorSource src(data);
    const auto run = run_pairwise(src, 15, s, loss, pk, 2);
    const auto naive = naive_pairwise(data, s, loss, pk);
    ASSERT_EQ(run.hypothesis.num_terms(), naive.terms.size());
    for (std::size_t k = 0; k < naive.terms.size(); ++k)
      EXPECT_LE(std::abs(run.hypothesis.coefficients()[k] - naive.terms[k].c), 1e-12 * std::max(1.0, std::abs(naive.terms[k].c)));
    for (int p = 0; p < 20; ++p) {
      const auto u = okl::testing::random_in_ball(rng, 2, 1.0), v = okl::testing::random_in_ball(rng, 2, 1.0);
      EXPECT_LE(std::abs(run.hypothesis.evaluate(u, v) - naive.eval(pk, u, v)), 1e-10);
    }
  }
}

TEST(NormEnvelopeBound, HoldsAtEveryIterationUnderPrecondition) {
  const PairKernel pk(kGauss);
  for (const auto& loss : {ActivatingLoss::logistic(), ActivatingLoss::least_squares()}) {
    const StepSchedule s(1.0 / (4.0 * loss.holder_L()), 0.75);
    const double cphi = c_phi(loss);
    for (std::uint64_t seed : {1u, 2u}) {
      SyntheticDistribution dist(kGauss, {.dim = 2, .centers = 10, .amplitude = 1.5, .seed = 77, .link = matching_link(loss)});
      SampledSource src(dist, seed);
      PairwiseTrainer tr(loss, pk, s, 2);
      for (std::size_t t = 1; t <= 500; ++t) {
        tr.observe(*src.next());
        if (t < 2) continue;
        const double envelope = cphi * std::sqrt(sum_gamma(s, 2, t));
        ASSERT_LE(tr.hypothesis().tracked_norm(), envelope + 1e-8) << loss.name() << " t=" << t;
      }
      EXPECT_NEAR(tr.hypothesis().tracked_norm(), tr.hypothesis().rkhs_norm_dense(), 1e-8);

      SampledSource again(dist, seed);
      const auto run = run_pairwise(again, 500, s, loss, pk, 2);
      EXPECT_TRUE(run.trajectory.norm_bound.applicable);
      EXPECT_TRUE(run.trajectory.norm_bound.precondition_holds);
      EXPECT_EQ(run.trajectory.norm_bound.iterations_checked, 500u);
      EXPECT_EQ(run.trajectory.norm_bound.violations, 0u);
      EXPECT_LE(run.trajectory.norm_bound.worst_gap, 0.0);
    }
  }
}

TEST(RunPointwise, SingleStepEqualsOneUpdate) {
  const std::vector<LabeledExample> data{{V{0.4, 0.1}, -1}};
  const StepSchedule s(0.5, 0.75);
  VectorSource src(data);
  const auto run = run_pointwise(src, 1, s, ActivatingLoss::logistic(), kGauss, 2);
  PointwiseTrainer tr(ActivatingLoss::logistic(), kGauss, s, 2);
  tr.step(data[0]);
  ASSERT_EQ(run.hypothesis.size(), 1u);
  EXPECT_EQ(run.hypothesis.coefficients()[0], tr.hypothesis().coefficients()[0]);
  ASSERT_EQ(run.trajectory.rows.size(), 1u);
  EXPECT_EQ(run.trajectory.rows[0].t, 1u);
  EXPECT_FALSE(run.trajectory.norm_bound.applicable);
}

TEST(RunPairwise, AllEqualLabelsGiveZeroHypothesis) {
  std::mt19937_64 rng(5);
  auto data = okl::testing::random_examples(rng, 60, 2, 1.0);
  for (auto& z : data) z.y = -1;
  VectorSource src(data);
  const auto run = run_pairwise(src, 60, StepSchedule(1.0, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss), 2);
  EXPECT_EQ(run.hypothesis.num_terms(), 0u);
  EXPECT_EQ(run.hypothesis.rkhs_norm(), 0.0);
  for (const auto& row : run.trajectory.rows) EXPECT_EQ(row.rkhs_norm, 0.0);
}

TEST(RunErrors, ExhaustedStreamAndBadConfigurations) {
  std::mt19937_64 rng(6);
  const auto data = okl::testing::random_examples(rng, 3, 2, 1.0);
  const StepSchedule s(0.5, 0.75);
  {
    VectorSource src(data);
    EXPECT_THROW(run_pointwise(src, 5, s, ActivatingLoss::logistic(), kGauss, 2), DataError);
  }
  {
    VectorSource src(data);
    EXPECT_THROW(run_pairwise(src, 5, s, ActivatingLoss::logistic(), PairKernel(kGauss), 2), DataError);
  }
  {
    VectorSource src(data);
    EXPECT_THROW(run_pointwise(src, 0, s, ActivatingLoss::logistic(), kGauss, 2), ConfigError);
    EXPECT_THROW(run_pairwise(src, 1, s, ActivatingLoss::logistic(), PairKernel(kGauss), 2), ConfigError);
    EXPECT_THROW(run_pairwise(src, 6000, s, ActivatingLoss::logistic(), PairKernel(kGauss), 2), ConfigError);
    EXPECT_THROW(run_pairwise(src, 3, StepSchedule(2.0, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss), 2),
                 ConfigError);
  }
  {
    VectorSource src(data);
    RunOptions opt;
    opt.allow_inadmissible = true;
    const auto run = run_pairwise(src, 3, StepSchedule(2.0, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss), 2,
                                  {}, nullptr, opt);
    EXPECT_FALSE(run.trajectory.norm_bound.precondition_holds);
  }
  {
    VectorSource src(data);
    LogOptions log;
    log.checkpoints = {2, 1};
    EXPECT_THROW(run_pointwise(src, 3, s, ActivatingLoss::logistic(), kGauss, 2, log), ConfigError);
  }
}

TEST(RunDeterminism, SameSeedGivesIdenticalOutput) {
  SyntheticDistribution dist(kGauss, {.dim = 2, .centers = 10, .amplitude = 1.5, .seed = 9, .link = {}});
  auto once = [&](std::uint64_t seed) {
    SampledSource src(dist, seed);
    return run_pointwise(src, 300, StepSchedule(0.5, 2.0 / 3.0), ActivatingLoss::logistic(), kGauss, 2);
  };
  const auto a = once(11), b = once(11), c = once(12);
  EXPECT_EQ(expansion_records(a.hypothesis), expansion_records(b.hypothesis));
  EXPECT_EQ(trajectory_csv(a.trajectory), trajectory_csv(b.trajectory));
  EXPECT_NE(expansion_records(a.hypothesis), expansion_records(c.hypothesis));

  auto pair_once = [&](std::uint64_t seed) {
    SampledSource src(dist, seed);
    return run_pairwise(src, 100, StepSchedule(1.0, 0.75), ActivatingLoss::logistic(), PairKernel(kGauss), 2);
  };
  EXPECT_EQ(expansion_records(pair_once(3).hypothesis), expansion_records(pair_once(3).hypothesis));
}

TEST(Checkpoints, GeometricDefault) {
  EXPECT_EQ(geometric_checkpoints(10), (std::vector<std::size_t>{1, 2, 4, 8, 10}));
  EXPECT_EQ(geometric_checkpoints(8), (std::vector<std::size_t>{1, 2, 4, 8}));
  EXPECT_EQ(geometric_checkpoints(1), (std::vector<std::size_t>{1}));
}

TEST(Trajectory, RowsCarryScheduleAndEnvelope) {
  std::mt19937_64 rng(7);
  const auto data = okl::testing::random_examples(rng, 40, 2, 1.0);
  VectorSource src(data);
  const StepSchedule s(1.0, 0.75);
  const auto lg = ActivatingLoss::logistic();
  LogOptions log;
  log.exact_norms = true;
  const auto run = run_pairwise(src, 40, s, lg, PairKernel(kGauss), 2, log);
  ASSERT_EQ(run.trajectory.rows.size(), geometric_checkpoints(40).size());
  for (const auto& row : run.trajectory.rows) {
    EXPECT_EQ(row.gamma_t, s.gamma(row.t));
    ASSERT_TRUE(row.lemma4_envelope.has_value());
    EXPECT_NEAR(*row.lemma4_envelope, lemma4_envelope(s, lg, row.t), 1e-14);
    EXPECT_LE(row.rkhs_norm, *row.lemma4_envelope + 1e-8);
  }
  const auto csv = trajectory_csv(run.trajectory);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,gamma_t,rkhs_norm,lemma4_envelope,heldout_risk,excess_risk");
}
