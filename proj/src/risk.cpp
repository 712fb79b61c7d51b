#include "okl/risk.hpp"

#include <algorithm>

#include <cblas.h>

#include "okl/errors.hpp"
#include "okl/simd.hpp"

namespace okl {

double pointwise_risk_from_scores(const ActivatingLoss& loss, std::span<const int> labels,
                                  std::span<const double> scores) {
  if (labels.empty()) throw DataError("risk of an empty evaluation set");
  if (labels.size() != scores.size()) throw ShapeError("labels and scores differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) total += loss.eval(labels[i] * scores[i]);
  return total / static_cast<double>(labels.size());
}

double true_risk(const DualExpansion& h, const EvalSet& eval, const ActivatingLoss& loss) {
  if (eval.size() == 0) throw DataError("risk of an empty evaluation set");
  std::vector<double> scores(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) scores[i] = h.evaluate(eval.points.point(i));
  return pointwise_risk_from_scores(loss, eval.labels, scores);
}

double pairwise_risk_from(const std::function<double(std::size_t, std::size_t)>& f,
                          const EvalSet& eval, const ActivatingLoss& loss) {
  const std::size_t n = eval.size();
  if (n < 2) throw DataError("pairwise risk needs at least two examples");
  double total = 0.0;
  const double tie = loss.eval(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int dy = eval.labels[i] - eval.labels[j];
      total += dy == 0 ? tie : loss.eval(dy * f(i, j));
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double pairwise_risk(const PairExpansion& f, const EvalSet& eval, const ActivatingLoss& loss) {
  PairwiseRiskTracker tracker(eval, loss, 0.0);
  return tracker.risk(f);
}

double excess_risk(const DualExpansion& h, const EvalSet& eval, const ActivatingLoss& loss,
                   const DualExpansion& reference) {
  return true_risk(h, eval, loss) - true_risk(reference, eval, loss);
}

double bayes_pointwise_risk(const EvalSet& eval, const ActivatingLoss& loss) {
  if (eval.eta.size() != eval.size()) throw DataError("evaluation set carries no conditional probabilities");
  std::vector<double> scores(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) scores[i] = bayes_score(loss, eval.eta[i]);
  return pointwise_risk_from_scores(loss, eval.labels, scores);
}

double bayes_pairwise_risk(const EvalSet& eval, const ActivatingLoss& loss) {
  if (eval.eta.size() != eval.size()) throw DataError("evaluation set carries no conditional probabilities");
  return pairwise_risk_from(
      [&](std::size_t i, std::size_t j) { return bayes_pair_score(loss, eval.eta[i], eval.eta[j]); },
      eval, loss);
}

PointwiseRiskTracker::PointwiseRiskTracker(const EvalSet& eval, ActivatingLoss loss, double reference_risk)
    : eval_(&eval), loss_(std::move(loss)), reference_risk_(reference_risk),
      scores_(eval.size(), 0.0), row_(eval.size()) {
  if (eval.size() == 0) throw DataError("risk of an empty evaluation set");
}

void PointwiseRiskTracker::catch_up(const DualExpansion& h) {
  if (h.size() < seen_) {
    std::fill(scores_.begin(), scores_.end(), 0.0);
    seen_ = 0;
  }
  const auto coefs = h.coefficients();
  for (std::size_t i = seen_; i < h.size(); ++i) {
    h.kernel().row(eval_->points, h.centers().point(i), row_);
    simd::axpy(coefs[i], row_, scores_);
  }
  seen_ = h.size();
}

void PointwiseRiskTracker::after_step(const DualExpansion& h) {
  if (!h.options().merge_duplicates) catch_up(h);
}

PointwiseRiskTracker::Values PointwiseRiskTracker::measure(std::size_t, const DualExpansion& h) {
  if (h.options().merge_duplicates) {
    seen_ = 0;
    std::fill(scores_.begin(), scores_.end(), 0.0);
  }
  catch_up(h);
  const double r = pointwise_risk_from_scores(loss_, eval_->labels, scores_);
  return {r, r - reference_risk_};
}

PairwiseRiskTracker::PairwiseRiskTracker(const EvalSet& eval, ActivatingLoss loss, double reference_risk)
    : eval_(&eval), loss_(std::move(loss)), reference_risk_(reference_risk) {
  if (eval.size() < 2) throw DataError("pairwise risk needs at least two examples");
  for (std::size_t i = 0; i < eval.size(); ++i) (eval.labels[i] > 0 ? pos_ : neg_).push_back(i);
}

void PairwiseRiskTracker::after_step(const PairExpansion& f) {
  const std::size_t n = f.num_points();
  if (n < rows_) {
    e_pos_.clear();
    e_neg_.clear();
    rows_ = 0;
  }
  std::vector<double> row(eval_->size());
  for (std::size_t i = rows_; i < n; ++i) {
    f.kernel().base().row(eval_->points, f.points().point(i), row);
    for (std::size_t k : pos_) e_pos_.push_back(row[k]);
    for (std::size_t k : neg_) e_neg_.push_back(row[k]);
  }
  rows_ = n;
}

double PairwiseRiskTracker::risk(const PairExpansion& f) {
  after_step(f);
  const std::size_t n = rows_;
  const std::size_t np = pos_.size();
  const std::size_t nn = neg_.size();
  const double tie = loss_.eval(0.0);
  const double ties = static_cast<double>(np) * static_cast<double>(np > 0 ? np - 1 : 0) +
                      static_cast<double>(nn) * static_cast<double>(nn > 0 ? nn - 1 : 0);
  double total = ties * tie;
  const double cross = 2.0 * static_cast<double>(np) * static_cast<double>(nn);
  if (np > 0 && nn > 0) {
    if (f.num_terms() == 0) {
      total += cross * tie;
    } else {
      const Matrix c = f.dense_coefficients();
      const int ni = static_cast<int>(n);
      const int npi = static_cast<int>(np);
      const int nni = static_cast<int>(nn);
      std::vector<double> m(n * std::max(np, nn));
      std::vector<double> scores(np * nn);
      // f(x_P, x_N) = E_P^T (C E_N)
      cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, nni, ni, 1.0, c.data.data(), ni,
                  e_neg_.data(), nni, 0.0, m.data(), nni);
      cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, npi, nni, ni, 1.0, e_pos_.data(), npi,
                  m.data(), nni, 0.0, scores.data(), nni);
      for (double s : scores) total += loss_.eval(2.0 * s);
      // f(x_N, x_P) = E_N^T (C E_P)
      cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, npi, ni, 1.0, c.data.data(), ni,
                  e_pos_.data(), npi, 0.0, m.data(), npi);
      cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, nni, npi, ni, 1.0, e_neg_.data(), nni,
                  m.data(), npi, 0.0, scores.data(), npi);
      for (double s : scores) total += loss_.eval(-2.0 * s);
    }
  }
  const double N = static_cast<double>(eval_->size());
  return total / (N * (N - 1.0));
}

PairwiseRiskTracker::Values PairwiseRiskTracker::measure(std::size_t, const PairExpansion& f) {
  const double r = risk(f);
  return {r, r - reference_risk_};
}

}  // namespace okl
