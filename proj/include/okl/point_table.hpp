#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace okl {

/// Points of a fixed dimension stored column-wise, so that coordinate k of all
/// points is contiguous (the layout the SIMD kernel rows read).
class PointTable {
 public:
  explicit PointTable(std::size_t dim = 1);

  std::size_t dim() const { return columns_.size(); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// ShapeError on dimension mismatch, DomainError on non-finite coordinates.
  std::size_t push_back(std::span<const double> x);

  double at(std::size_t i, std::size_t k) const { return columns_[k][i]; }
  std::vector<double> point(std::size_t i) const;
  std::span<const double> column(std::size_t k) const { return columns_[k]; }

  /// Column base pointers, valid until the next push_back.
  std::vector<const double*> column_pointers() const;

  void reserve(std::size_t n);

  friend bool operator==(const PointTable&, const PointTable&) = default;

 private:
  std::vector<std::vector<double>> columns_;
  std::size_t size_ = 0;
};

/// Dense row-major matrix; the only matrix type the library exposes.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

}  // namespace okl
