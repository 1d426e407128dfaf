#pragma once

#include "urank/posterior.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace urank {

inline constexpr std::size_t kDefaultSamples = 1024;

/// QMC draws of the two linear predictors zeta = beta^T x and eta = rho^T x.
/// Without a dispersion block (logistic models) eta is empty and theta is a
/// point mass at sigmoid(zeta).
struct PredictorSamples {
  std::vector<double> zeta;
  std::vector<double> eta;
  std::uint64_t seed = 0;

  std::size_t m() const { return zeta.size(); }
  bool has_dispersion() const { return !eta.empty(); }
  /// Beta parameters (exp(zeta + eta), exp(eta)) of sample t.
  AlphaTriple alphas(std::size_t t) const;
};

PredictorSamples sample_linear_predictors(const PosteriorModel& model, const SparseVector& x, std::size_t m,
                                          std::uint64_t seed);

/// (1/m) sum_t Be(theta; exp(zeta_t + eta_t), exp(eta_t)) at every grid point.
std::vector<double> predictive_density(const PredictorSamples& samples, std::span<const double> theta);

} // namespace urank
