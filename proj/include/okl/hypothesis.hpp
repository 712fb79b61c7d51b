#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "okl/kernels.hpp"
#include "okl/point_table.hpp"

namespace okl {

struct ExpansionOptions {
  /// Fold a section whose center already exists into the existing coefficient.
  bool merge_duplicates = false;
  /// Maintain ||h||^2 under appends so tracked_norm() is O(1).
  bool track_norm = false;
};

/// h = sum_i c_i G(center_i, .), an element of the RKHS of G.
///
/// Single writer: the owning trainer mutates it; copies are independent.
class DualExpansion {
 public:
  DualExpansion(Kernel kernel, std::size_t dim, ExpansionOptions options = {});

  std::size_t size() const { return coefficients_.size(); }
  std::size_t dim() const { return centers_.dim(); }
  const Kernel& kernel() const { return kernel_; }
  const PointTable& centers() const { return centers_; }
  std::span<const double> coefficients() const { return coefficients_; }
  const ExpansionOptions& options() const { return options_; }

  /// ShapeError on dimension mismatch.
  double evaluate(std::span<const double> x) const;

  /// sqrt(c^T Gram c) recomputed from scratch, O(m^2). Negative quadratic
  /// forms within 1e-6 relative clamp to 0; below that NumericalPsdError.
  double rkhs_norm() const;
  double squared_norm() const;

  /// Incrementally maintained norm; StateError unless track_norm was set.
  double tracked_norm() const;

  /// Appends weight * G(center, .). A zero weight leaves the expansion
  /// untouched. value_at_center, when the caller already knows h(center) for
  /// the current h, saves the O(m) evaluation the norm update needs.
  /// DomainError on non-finite weight.
  void add_scaled_section(std::span<const double> center, double weight,
                          std::optional<double> value_at_center = std::nullopt);

 private:
  Kernel kernel_;
  PointTable centers_;
  std::vector<double> coefficients_;
  ExpansionOptions options_;
  std::map<std::vector<double>, std::size_t> index_;
  double tracked_sq_ = 0.0;
};

/// f = sum_k c_k K((p_{i_k}, p_{j_k}), .) for the product pair kernel.
///
/// Sections reference rows of an internal point table. Terms are grouped in
/// blocks that share the first component (the anchor); the online pairwise
/// update appends one block per step. The Gram matrix of the stored points is
/// cached packed lower-triangular, so memory grows as n^2/2 doubles.
class PairExpansion {
 public:
  struct Block {
    std::size_t anchor;
    std::size_t begin;
    std::size_t end;
  };

  PairExpansion(PairKernel kernel, std::size_t dim, ExpansionOptions options = {});

  const PairKernel& kernel() const { return kernel_; }
  std::size_t dim() const { return points_.dim(); }
  const PointTable& points() const { return points_; }
  std::size_t num_points() const { return points_.size(); }
  std::size_t num_terms() const { return coefs_.size(); }
  const ExpansionOptions& options() const { return options_; }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::span<const std::size_t> partners() const { return partners_; }
  std::span<const double> coefficients() const { return coefs_; }

  /// G(p_i, p_j) from the cache.
  double gram(std::size_t i, std::size_t j) const;

  /// Stores a point (reusing an identical one when merging) and returns its index.
  std::size_t add_point(std::span<const double> x);

  void add_scaled_section(std::span<const double> first, std::span<const double> second,
                          double weight);
  void add_indexed_section(std::size_t first, std::size_t second, double weight);

  /// Values f(p_anchor, p_j) for every stored point j, O(n^2 + m).
  std::vector<double> evaluate_anchor_row(std::size_t anchor) const;

  /// Appends sum_k weights[k] K((p_anchor, p_{partners[k]}), .); zero
  /// weights are skipped. anchor_row must be evaluate_anchor_row(anchor) of
  /// the current expansion when norm tracking is on (it is ignored otherwise).
  void append_block(std::size_t anchor, std::span<const std::size_t> partners,
                    std::span<const double> weights, std::span<const double> anchor_row);

  /// ShapeError on dimension mismatch.
  double evaluate(std::span<const double> u, std::span<const double> v) const;

  /// Norm from scratch: pairwise term sum when small, dense G C G route otherwise.
  double rkhs_norm() const;
  /// Double sum over all term pairs, O(m^2).
  double rkhs_norm_termwise() const;
  /// trace(C^T G C G) with the aggregated n x n coefficient matrix, O(n^3).
  double rkhs_norm_dense() const;
  double tracked_norm() const;

  /// C[i][j] = total coefficient on K((p_i, p_j), .).
  Matrix dense_coefficients() const;

 private:
  void append_term(std::size_t first, std::size_t second, double weight);
  void refresh_norm_after_block(std::size_t anchor, std::span<const std::size_t> partners,
                                std::span<const double> weights, std::span<const double> anchor_row);

  PairKernel kernel_;
  PointTable points_;
  ExpansionOptions options_;
  std::vector<double> gram_packed_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> partners_;
  std::vector<double> coefs_;
  std::map<std::vector<double>, std::size_t> point_index_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> term_index_;
  double tracked_sq_ = 0.0;
};

double clamp_quadratic_form(double value, double scale);

}  // namespace okl
