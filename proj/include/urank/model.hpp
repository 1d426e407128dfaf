#pragma once

#include "urank/sparse.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace urank {

/// Stacked regression coefficients: beta drives the mean, rho the concentration.
struct CoefficientPair {
  Eigen::VectorXd beta;
  Eigen::VectorXd rho;

  static CoefficientPair zeros(Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  }
  Index dim() const { return static_cast<Index>(beta.size()); }
};

/// Beta parameters of one context. `alpha` is cached so every derivative
/// formula sees the same rounding of alpha_plus + alpha_minus.
struct AlphaTriple {
  double alpha_plus = 1.0;
  double alpha_minus = 1.0;
  double alpha = 2.0;
};

struct LocalDerivatives {
  double g_beta = 0.0;
  double g_rho = 0.0;
  double h_beta = 0.0;
  double h_beta_rho = 0.0;
  double h_rho = 0.0;
};

/// Linear predictors are clamped to +-kPredictorClamp before exponentiation.
inline constexpr double kPredictorClamp = 30.0;

AlphaTriple make_alpha_triple(double alpha_plus, double alpha_minus);

/// alpha+ = exp((beta + rho)^T x), alpha- = exp(rho^T x), from the two
/// predictors zeta = beta^T x and eta = rho^T x.
AlphaTriple alphas_from_predictors(double zeta, double eta);
AlphaTriple alphas(const CoefficientPair& w, const SparseVector& x);

/// ln BB(v; n, alpha+, alpha-), the Beta-binomial mass without the binomial
/// coefficient.
double log_bb_pmf(std::int64_t v, std::int64_t n, const AlphaTriple& a);

/// First and second derivatives of -ln BB with respect to zeta = beta^T x and
/// eta = rho^T x.
LocalDerivatives local_derivatives(std::int64_t v, std::int64_t n, const AlphaTriple& a);

double sigmoid(double z);

/// Mean of the conditional Beta, 1 / (1 + exp(-beta^T x)); rho plays no role.
double beta_mean(const CoefficientPair& w, const SparseVector& x);

} // namespace urank
