#pragma once

#include "urank/sparse.hpp"

#include <Eigen/Dense>

#include <span>

// Data-parallel inner loops shared by training, the Laplace stage and scoring.
//
// The default namespace holds the OpenMP versions. `serial` keeps the plain
// single-loop reference implementations; tests compare the two and the
// benchmark target times them against each other.
//
// Matrix-vector products never reduce across threads: X*w is split by rows and
// X^T*g by columns (through the transposed storage), and every output entry
// accumulates its terms in increasing row order. Those kernels are bit-identical
// to their serial references. Scalar sums use fixed chunks (see
// parallel::kReductionChunk), so they are thread-count independent but may
// differ from the serial loop in the last bits.
namespace urank::kernels {

Eigen::VectorXd multiply(const SparseDesign& x, const Eigen::VectorXd& w);
Eigen::VectorXd multiply_transpose(const SparseDesign& x, std::span<const double> g);
Eigen::MatrixXd multiply_dense(const SparseDesign& x, const Eigen::MatrixXd& q);
Eigen::MatrixXd multiply_transpose_dense(const SparseDesign& x, const Eigen::MatrixXd& y);
/// X^T X Q without forming X^T X.
Eigen::MatrixXd gram_apply(const SparseDesign& x, const Eigen::MatrixXd& q);
double sum(std::span<const double> values);

namespace serial {
Eigen::VectorXd multiply(const SparseDesign& x, const Eigen::VectorXd& w);
Eigen::VectorXd multiply_transpose(const SparseDesign& x, std::span<const double> g);
Eigen::MatrixXd gram_apply(const SparseDesign& x, const Eigen::MatrixXd& q);
double sum(std::span<const double> values);
} // namespace serial

} // namespace urank::kernels
