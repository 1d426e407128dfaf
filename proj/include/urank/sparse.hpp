#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace urank {

using Index = std::uint32_t;

/// Sparse vector with strictly increasing indices, no stored zeros and finite values.
class SparseVector {
public:
  SparseVector() = default;
  explicit SparseVector(Index dim) : dim_(dim) {}

  /// Validates the invariants; throws InputError on violation.
  SparseVector(Index dim, std::vector<Index> indices, std::vector<double> values);

  /// Builds from unsorted (index, value) pairs; zeros are dropped, duplicates rejected.
  static SparseVector from_pairs(Index dim, std::vector<std::pair<Index, double>> entries);
  static SparseVector from_dense(const Eigen::VectorXd& dense);

  Index dim() const { return dim_; }
  std::size_t nnz() const { return indices_.size(); }
  std::span<const Index> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }

  double dot(const Eigen::VectorXd& dense) const;
  double dot(const SparseVector& other) const;
  double squared_norm() const;
  Eigen::VectorXd to_dense() const;
  SparseVector scaled(double factor) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
  Index dim_ = 0;
  std::vector<Index> indices_;
  std::vector<double> values_;
};

/// Compressed row storage plus its transpose, so that both X*w and X^T*g can be
/// evaluated in parallel without cross-thread reductions.
class SparseDesign {
public:
  SparseDesign() = default;
  SparseDesign(Index cols, std::span<const SparseVector> rows);

  /// n x 1 design of ones (an intercept column).
  static SparseDesign intercept(std::size_t rows);

  std::size_t rows() const { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  Index cols() const { return cols_; }
  std::size_t nnz() const { return row_idx_.size(); }

  std::span<const Index> row_indices(std::size_t r) const {
    return {row_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {row_val_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }
  /// Column view: row ids in increasing order and the matching values.
  std::span<const std::uint32_t> col_rows(Index c) const {
    return {col_row_.data() + col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]};
  }
  std::span<const double> col_values(Index c) const {
    return {col_val_.data() + col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]};
  }

  SparseVector row(std::size_t r) const;

  /// Rows scaled by per-row factors; rows whose factor is zero are dropped.
  SparseDesign scaled_rows(std::span<const double> factors) const;

private:
  void build_columns();

  Index cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> row_val_;
  std::vector<std::size_t> col_ptr_;
  std::vector<std::uint32_t> col_row_;
  std::vector<double> col_val_;
};

} // namespace urank
