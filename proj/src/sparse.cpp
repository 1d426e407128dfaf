#include "urank/sparse.hpp"

#include "urank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace urank {

SparseVector::SparseVector(Index dim, std::vector<Index> indices, std::vector<double> values)
    : dim_(dim), indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) throw InputError("sparse vector: indices and values differ in length");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= dim_) {
      throw InputError("sparse vector: index " + std::to_string(indices_[i]) + " out of range for dim " +
                       std::to_string(dim_));
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) throw InputError("sparse vector: indices not strictly increasing");
    if (!std::isfinite(values_[i])) throw InputError("sparse vector: non-finite value");
    if (values_[i] == 0.0) throw InputError("sparse vector: explicit zero stored");
  }
}

SparseVector SparseVector::from_pairs(Index dim, std::vector<std::pair<Index, double>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(entries.size());
  val.reserve(entries.size());
  for (const auto& [i, v] : entries) {
    if (v == 0.0) continue;
    if (!idx.empty() && idx.back() == i) throw InputError("sparse vector: duplicate index " + std::to_string(i));
    idx.push_back(i);
    val.push_back(v);
  }
  return SparseVector(dim, std::move(idx), std::move(val));
}

SparseVector SparseVector::from_dense(const Eigen::VectorXd& dense) {
  std::vector<Index> idx;
  std::vector<double> val;
  for (Eigen::Index i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      idx.push_back(static_cast<Index>(i));
      val.push_back(dense[i]);
    }
  }
  return SparseVector(static_cast<Index>(dense.size()), std::move(idx), std::move(val));
}

double SparseVector::dot(const Eigen::VectorXd& dense) const {
  if (dense.size() != static_cast<Eigen::Index>(dim_)) {
    throw InputError("dimension mismatch: sparse " + std::to_string(dim_) + " vs dense " +
                     std::to_string(dense.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < indices_.size(); ++i) s += values_[i] * dense[indices_[i]];
  return s;
}

double SparseVector::dot(const SparseVector& other) const {
  if (other.dim_ != dim_) {
    throw InputError("dimension mismatch: " + std::to_string(dim_) + " vs " + std::to_string(other.dim_));
  }
  double s = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < indices_.size() && j < other.indices_.size()) {
    if (indices_[i] == other.indices_[j]) s += values_[i++] * other.values_[j++];
    else if (indices_[i] < other.indices_[j]) ++i;
    else ++j;
  }
  return s;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

Eigen::VectorXd SparseVector::to_dense() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (std::size_t i = 0; i < indices_.size(); ++i) out[indices_[i]] = values_[i];
  return out;
}

SparseVector SparseVector::scaled(double factor) const {
  if (factor == 0.0) return SparseVector(dim_);
  SparseVector out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

SparseDesign::SparseDesign(Index cols, std::span<const SparseVector> rows) : cols_(cols) {
  row_ptr_.reserve(rows.size() + 1);
  for (const auto& r : rows) {
    if (r.dim() != cols) {
      throw InputError("design row has dimension " + std::to_string(r.dim()) + ", expected " + std::to_string(cols));
    }
    row_idx_.insert(row_idx_.end(), r.indices().begin(), r.indices().end());
    row_val_.insert(row_val_.end(), r.values().begin(), r.values().end());
    row_ptr_.push_back(row_idx_.size());
  }
  build_columns();
}

SparseDesign SparseDesign::intercept(std::size_t rows) {
  SparseDesign d;
  d.cols_ = 1;
  d.row_ptr_.resize(rows + 1);
  for (std::size_t r = 0; r <= rows; ++r) d.row_ptr_[r] = r;
  d.row_idx_.assign(rows, 0);
  d.row_val_.assign(rows, 1.0);
  d.build_columns();
  return d;
}

SparseVector SparseDesign::row(std::size_t r) const {
  auto idx = row_indices(r);
  auto val = row_values(r);
  return SparseVector(cols_, {idx.begin(), idx.end()}, {val.begin(), val.end()});
}

SparseDesign SparseDesign::scaled_rows(std::span<const double> factors) const {
  SparseDesign out;
  out.cols_ = cols_;
  for (std::size_t r = 0; r < rows(); ++r) {
    if (factors[r] == 0.0) continue;
    auto idx = row_indices(r);
    auto val = row_values(r);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.row_idx_.push_back(idx[i]);
      out.row_val_.push_back(val[i] * factors[r]);
    }
    out.row_ptr_.push_back(out.row_idx_.size());
  }
  out.build_columns();
  return out;
}

void SparseDesign::build_columns() {
  col_ptr_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : row_idx_) ++col_ptr_[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) col_ptr_[c + 1] += col_ptr_[c];
  col_row_.resize(row_idx_.size());
  col_val_.resize(row_idx_.size());
  std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t slot = fill[row_idx_[k]]++;
      col_row_[slot] = static_cast<std::uint32_t>(r);
      col_val_[slot] = row_val_[k];
    }
  }
}

} // namespace urank
