#include "urank/kernels.hpp"

#include "urank/parallel.hpp"

#include <omp.h>

#include <vector>

namespace urank::kernels {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double row_dot(const SparseDesign& x, std::size_t r, const Eigen::VectorXd& w) {
  auto idx = x.row_indices(r);
  auto val = x.row_values(r);
  double s = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * w[idx[k]];
  return s;
}

} // namespace

Eigen::VectorXd multiply(const SparseDesign& x, const Eigen::VectorXd& w) {
  const auto n = static_cast<std::int64_t>(x.rows());
  Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) out[r] = row_dot(x, static_cast<std::size_t>(r), w);
  return out;
}

Eigen::VectorXd multiply_transpose(const SparseDesign& x, std::span<const double> g) {
  const auto d = static_cast<std::int64_t>(x.cols());
  Eigen::VectorXd out(d);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t c = 0; c < d; ++c) {
    auto rows = x.col_rows(static_cast<Index>(c));
    auto vals = x.col_values(static_cast<Index>(c));
    double s = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) s += vals[k] * g[rows[k]];
    out[c] = s;
  }
  return out;
}

Eigen::MatrixXd multiply_dense(const SparseDesign& x, const Eigen::MatrixXd& q) {
  const auto n = static_cast<std::int64_t>(x.rows());
  const Eigen::Index l = q.cols();
  const RowMatrix qr = q;
  RowMatrix out = RowMatrix::Zero(n, l);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    auto idx = x.row_indices(static_cast<std::size_t>(r));
    auto val = x.row_values(static_cast<std::size_t>(r));
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double* src = qr.row(idx[k]).data();
      for (Eigen::Index j = 0; j < l; ++j) dst[j] += val[k] * src[j];
    }
  }
  return out;
}

Eigen::MatrixXd multiply_transpose_dense(const SparseDesign& x, const Eigen::MatrixXd& y) {
  const auto d = static_cast<std::int64_t>(x.cols());
  const Eigen::Index l = y.cols();
  const RowMatrix yr = y;
  RowMatrix out = RowMatrix::Zero(d, l);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t c = 0; c < d; ++c) {
    auto rows = x.col_rows(static_cast<Index>(c));
    auto vals = x.col_values(static_cast<Index>(c));
    double* dst = out.row(c).data();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double* src = yr.row(rows[k]).data();
      for (Eigen::Index j = 0; j < l; ++j) dst[j] += vals[k] * src[j];
    }
  }
  return out;
}

Eigen::MatrixXd gram_apply(const SparseDesign& x, const Eigen::MatrixXd& q) {
  return multiply_transpose_dense(x, multiply_dense(x, q));
}

double sum(std::span<const double> values) {
  const std::size_t chunk = parallel::kReductionChunk;
  const std::size_t chunks = (values.size() + chunk - 1) / chunk;
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = std::min(values.size(), begin + chunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

namespace serial {

Eigen::VectorXd multiply(const SparseDesign& x, const Eigen::VectorXd& w) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.rows()));
  for (std::size_t r = 0; r < x.rows(); ++r) out[static_cast<Eigen::Index>(r)] = row_dot(x, r, w);
  return out;
}

Eigen::VectorXd multiply_transpose(const SparseDesign& x, std::span<const double> g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto idx = x.row_indices(r);
    auto val = x.row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += val[k] * g[r];
  }
  return out;
}

Eigen::MatrixXd gram_apply(const SparseDesign& x, const Eigen::MatrixXd& q) {
  const Eigen::Index l = q.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.cols(), l);
  std::vector<double> y(static_cast<std::size_t>(l));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto idx = x.row_indices(r);
    auto val = x.row_values(r);
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (Eigen::Index j = 0; j < l; ++j) y[static_cast<std::size_t>(j)] += val[k] * q(idx[k], j);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (Eigen::Index j = 0; j < l; ++j) out(idx[k], j) += val[k] * y[static_cast<std::size_t>(j)];
  }
  return out;
}

double sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

} // namespace serial
} // namespace urank::kernels
