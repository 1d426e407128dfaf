#include "urank/thin_svd.hpp"

#include "urank/errors.hpp"
#include "urank/kernels.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace urank {
namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

bool all_zero(const SparseDesign& x) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row_values(r)) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

} // namespace

ThinSvd thin_svd(const SparseDesign& rows, int k, std::uint64_t seed) {
  const Eigen::Index d = rows.cols();
  if (k < 0) throw InputError("rank must be non-negative");
  if (all_zero(rows)) return {Eigen::MatrixXd::Zero(d, 0), Eigen::VectorXd(0)};
  const auto limit = std::min<std::int64_t>(d, static_cast<std::int64_t>(rows.rows()));
  if (k > limit) {
    throw InputError("rank " + std::to_string(k) + " exceeds min(d, rows) = " + std::to_string(limit));
  }
  if (k == 0) return {Eigen::MatrixXd::Zero(d, 0), Eigen::VectorXd(0)};

  const Eigen::Index width = std::min<Eigen::Index>(d, k + kSvdOversample);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd omega(d, width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) omega(i, j) = normal(rng);
  }

  Eigen::MatrixXd q = orthonormalize(kernels::gram_apply(rows, omega));
  for (int it = 0; it < kSvdPowerIterations; ++it) q = orthonormalize(kernels::gram_apply(rows, q));

  Eigen::MatrixXd t = q.transpose() * kernels::gram_apply(rows, q);
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  if (eig.info() != Eigen::Success) throw NumericError("eigen decomposition failed in thin_svd");

  // Eigenvalues come back ascending.
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = ev[width - 1];
  int keep = 0;
  while (keep < k && ev[width - 1 - keep] > 1e-12 * top && ev[width - 1 - keep] > 0.0) ++keep;

  ThinSvd out;
  out.lambda.resize(keep);
  Eigen::MatrixXd u(width, keep);
  for (int l = 0; l < keep; ++l) {
    out.lambda[l] = ev[width - 1 - l];
    u.col(l) = eig.eigenvectors().col(width - 1 - l);
  }
  out.V = q * u;
  return out;
}

} // namespace urank
