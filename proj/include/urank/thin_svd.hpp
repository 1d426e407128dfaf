#pragma once

#include "urank/sparse.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace urank {

/// Top right singular vectors V (d x k, orthonormal columns) and squared
/// singular values lambda, so that X^T X ~ V diag(lambda) V^T.
struct ThinSvd {
  Eigen::MatrixXd V;
  Eigen::VectorXd lambda;
  int rank() const { return static_cast<int>(lambda.size()); }
};

inline constexpr int kSvdOversample = 10;
inline constexpr int kSvdPowerIterations = 2;

/// Randomized subspace iteration on X^T X followed by Rayleigh-Ritz.
/// Directions with lambda <= 1e-12 * lambda_max are dropped, so the returned
/// rank may be below k. An all-zero X yields rank 0. Requires
/// k <= min(d, rows).
ThinSvd thin_svd(const SparseDesign& rows, int k, std::uint64_t seed);

} // namespace urank
