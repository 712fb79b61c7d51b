#include <algorithm>
#include <cmath>

#include <cblas.h>

#include "okl/errors.hpp"
#include "okl/hypothesis.hpp"
#include "okl/simd.hpp"

namespace okl {

namespace {

std::size_t packed_offset(std::size_t i) { return i * (i + 1) / 2; }

void check_finite_weight(double w) {
  if (!std::isfinite(w)) throw DomainError("section weight must be finite");
}

}  // namespace

PairExpansion::PairExpansion(PairKernel kernel, std::size_t dim, ExpansionOptions options)
    : kernel_(std::move(kernel)), points_(dim), options_(options) {}

double PairExpansion::gram(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  return gram_packed_[packed_offset(i) + j];
}

std::size_t PairExpansion::add_point(std::span<const double> x) {
  if (x.size() != dim()) throw ShapeError("pair expansion: point dimension mismatch");
  if (options_.merge_duplicates) {
    const auto it = point_index_.find(std::vector<double>(x.begin(), x.end()));
    if (it != point_index_.end()) return it->second;
  }
  const std::size_t n = points_.size();
  gram_packed_.resize(packed_offset(n + 1));
  kernel_.base().row(points_, x, std::span<double>(gram_packed_.data() + packed_offset(n), n));
  gram_packed_.back() = kernel_.base().eval(x, x);
  const std::size_t idx = points_.push_back(x);
  if (options_.merge_duplicates) point_index_.emplace(std::vector<double>(x.begin(), x.end()), idx);
  return idx;
}

void PairExpansion::append_term(std::size_t first, std::size_t second, double weight) {
  if (options_.merge_duplicates) {
    const auto [it, inserted] = term_index_.try_emplace({first, second}, coefs_.size());
    if (!inserted) {
      coefs_[it->second] += weight;
      return;
    }
  }
  if (blocks_.empty() || blocks_.back().anchor != first || blocks_.back().end != coefs_.size()) {
    blocks_.push_back({first, coefs_.size(), coefs_.size()});
  }
  partners_.push_back(second);
  coefs_.push_back(weight);
  blocks_.back().end = coefs_.size();
}

void PairExpansion::add_scaled_section(std::span<const double> first, std::span<const double> second,
                                       double weight) {
  check_finite_weight(weight);
  if (first.size() != dim() || second.size() != dim())
    throw ShapeError("pair section: point dimension mismatch");
  if (weight == 0.0) return;
  const std::size_t i = add_point(first);
  const std::size_t j = add_point(second);
  add_indexed_section(i, j, weight);
}

void PairExpansion::add_indexed_section(std::size_t first, std::size_t second, double weight) {
  check_finite_weight(weight);
  if (first >= num_points() || second >= num_points())
    throw ShapeError("pair section: point index out of range");
  if (weight == 0.0) return;
  if (options_.track_norm) {
    const double f_ij = evaluate_anchor_row(first)[second];
    tracked_sq_ += 2.0 * weight * f_ij + weight * weight * gram(first, first) * gram(second, second);
  }
  append_term(first, second, weight);
}

std::vector<double> PairExpansion::evaluate_anchor_row(std::size_t anchor) const {
  const std::size_t n = num_points();
  if (anchor >= n) throw ShapeError("anchor index out of range");
  std::vector<double> w(n, 0.0);
  for (const Block& b : blocks_) {
    const double s = gram(b.anchor, anchor);
    if (s == 0.0) continue;
    for (std::size_t k = b.begin; k < b.end; ++k) w[partners_[k]] += s * coefs_[k];
  }
  std::vector<double> out(n);
  simd::packed_symv(gram_packed_.data(), n, w.data(), out.data());
  return out;
}

void PairExpansion::refresh_norm_after_block(std::size_t anchor, std::span<const std::size_t> partners,
                                             std::span<const double> weights,
                                             std::span<const double> anchor_row) {
  const std::size_t n = num_points();
  if (anchor_row.size() != n) throw ShapeError("append_block: anchor row has the wrong length");
  std::vector<double> u(n, 0.0);
  double cross = 0.0;
  for (std::size_t k = 0; k < partners.size(); ++k) {
    u[partners[k]] += weights[k];
    cross += weights[k] * anchor_row[partners[k]];
  }
  const double self = gram(anchor, anchor) * simd::packed_quadratic_form(gram_packed_.data(), n, u.data());
  tracked_sq_ += 2.0 * cross + self;
}

void PairExpansion::append_block(std::size_t anchor, std::span<const std::size_t> partners,
                                 std::span<const double> weights, std::span<const double> anchor_row) {
  if (partners.size() != weights.size()) throw ShapeError("append_block: partners and weights differ in length");
  const std::size_t n = num_points();
  if (anchor >= n) throw ShapeError("append_block: anchor index out of range");
  for (std::size_t k = 0; k < partners.size(); ++k) {
    if (partners[k] >= n) throw ShapeError("append_block: partner index out of range");
    check_finite_weight(weights[k]);
  }
  if (options_.track_norm) refresh_norm_after_block(anchor, partners, weights, anchor_row);
  for (std::size_t k = 0; k < partners.size(); ++k) {
    if (weights[k] != 0.0) append_term(anchor, partners[k], weights[k]);
  }
}

double PairExpansion::evaluate(std::span<const double> u, std::span<const double> v) const {
  if (u.size() != dim() || v.size() != dim()) throw ShapeError("pair evaluate: point dimension mismatch");
  if (coefs_.empty()) return 0.0;
  const auto gu = kernel_.base().row(points_, u);
  const auto gv = kernel_.base().row(points_, v);
  double total = 0.0;
  for (const Block& b : blocks_) {
    double inner = 0.0;
    for (std::size_t k = b.begin; k < b.end; ++k) inner += coefs_[k] * gv[partners_[k]];
    total += gu[b.anchor] * inner;
  }
  return total;
}

Matrix PairExpansion::dense_coefficients() const {
  const std::size_t n = num_points();
  Matrix c(n, n);
  for (const Block& b : blocks_) {
    for (std::size_t k = b.begin; k < b.end; ++k) c(b.anchor, partners_[k]) += coefs_[k];
  }
  return c;
}

namespace {

double clamp_scale(std::span<const double> coefs, double max_diag) {
  double c2 = 0.0;
  for (double c : coefs) c2 += c * c;
  return c2 * max_diag * max_diag;
}

}  // namespace

double PairExpansion::rkhs_norm_termwise() const {
  const std::size_t m = num_terms();
  if (m == 0) return 0.0;
  std::vector<std::size_t> firsts(m);
  for (const Block& b : blocks_) std::fill(firsts.begin() + b.begin, firsts.begin() + b.end, b.anchor);
  double q = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < m; ++l)
      row += coefs_[l] * gram(firsts[k], firsts[l]) * gram(partners_[k], partners_[l]);
    q += coefs_[k] * row;
  }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < num_points(); ++i) max_diag = std::max(max_diag, gram(i, i));
  return std::sqrt(clamp_quadratic_form(q, clamp_scale(coefs_, max_diag)));
}

double PairExpansion::rkhs_norm_dense() const {
  const std::size_t n = num_points();
  if (coefs_.empty()) return 0.0;
  Matrix g(n, n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) g(i, j) = g(j, i) = gram(i, j);
    max_diag = std::max(max_diag, g(i, i));
  }
  const Matrix c = dense_coefficients();
  const int ni = static_cast<int>(n);
  std::vector<double> gc(n * n);
  std::vector<double> gcg(n * n);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, ni, ni, 1.0, g.data.data(), ni,
              c.data.data(), ni, 0.0, gc.data(), ni);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, ni, ni, 1.0, gc.data(), ni,
              g.data.data(), ni, 0.0, gcg.data(), ni);
  double q = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) q += gcg[k] * c.data[k];
  return std::sqrt(clamp_quadratic_form(q, clamp_scale(c.data, max_diag)));
}

double PairExpansion::rkhs_norm() const {
  const double m = static_cast<double>(num_terms());
  const double n = static_cast<double>(num_points());
  return m * m <= n * n * n ? rkhs_norm_termwise() : rkhs_norm_dense();
}

double PairExpansion::tracked_norm() const {
  if (!options_.track_norm) throw StateError("norm tracking is disabled for this expansion");
  return std::sqrt(std::max(tracked_sq_, 0.0));
}

}  // namespace okl
