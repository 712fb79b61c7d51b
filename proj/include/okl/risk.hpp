#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "okl/hypothesis.hpp"
#include "okl/losses.hpp"
#include "okl/synthetic.hpp"
#include "okl/trainers.hpp"

namespace okl {

/// Mean of phi(y_i s_i) over precomputed scores. DataError when empty.
double pointwise_risk_from_scores(const ActivatingLoss& loss, std::span<const int> labels,
                                  std::span<const double> scores);

/// (1/N) sum_i phi(y_i h(x_i)). DataError on an empty set.
double true_risk(const DualExpansion& h, const EvalSet& eval, const ActivatingLoss& loss);

/// U-statistic (1/(N(N-1))) sum_{i != j} phi((y_i - y_j) f(x_i, x_j)) for an
/// arbitrary score function of index pairs. DataError when N < 2.
double pairwise_risk_from(const std::function<double(std::size_t, std::size_t)>& f,
                          const EvalSet& eval, const ActivatingLoss& loss);

/// The U-statistic for an expansion, evaluated through dense kernel products.
double pairwise_risk(const PairExpansion& f, const EvalSet& eval, const ActivatingLoss& loss);

/// true_risk(h) - true_risk(reference); not clamped.
double excess_risk(const DualExpansion& h, const EvalSet& eval, const ActivatingLoss& loss,
                   const DualExpansion& reference);

/// Eval-set risk of the closed-form minimizer (needs eta on the eval set).
double bayes_pointwise_risk(const EvalSet& eval, const ActivatingLoss& loss);
double bayes_pairwise_risk(const EvalSet& eval, const ActivatingLoss& loss);

/// Keeps h(x_i) for every eval point up to date as centers are appended, so a
/// step costs one kernel row over the eval set. With merged duplicates the
/// scores are rebuilt at each measurement instead.
class PointwiseRiskTracker final : public RiskMonitor<DualExpansion> {
 public:
  PointwiseRiskTracker(const EvalSet& eval, ActivatingLoss loss, double reference_risk);
  void after_step(const DualExpansion& h) override;
  Values measure(std::size_t t, const DualExpansion& h) override;

 private:
  void catch_up(const DualExpansion& h);

  const EvalSet* eval_;
  ActivatingLoss loss_;
  double reference_risk_;
  std::vector<double> scores_;
  std::vector<double> row_;
  std::size_t seen_ = 0;
};

/// Pairwise risk at checkpoints. Kernel rows from stored points to the eval
/// set are cached as points arrive; a measurement forms the cross-label score
/// blocks E_P^T C E_N and E_N^T C E_P by matrix products. Same-label pairs
/// score phi(0) whatever f is.
class PairwiseRiskTracker final : public RiskMonitor<PairExpansion> {
 public:
  PairwiseRiskTracker(const EvalSet& eval, ActivatingLoss loss, double reference_risk);
  void after_step(const PairExpansion& f) override;
  Values measure(std::size_t t, const PairExpansion& f) override;
  double risk(const PairExpansion& f);

 private:
  const EvalSet* eval_;
  ActivatingLoss loss_;
  double reference_risk_;
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> neg_;
  std::vector<double> e_pos_;  // n x |pos| row-major
  std::vector<double> e_neg_;  // n x |neg| row-major
  std::size_t rows_ = 0;
};

}  // namespace okl
