#pragma once

#include "urank/dataset.hpp"
#include "urank/optimizer.hpp"
#include "urank/posterior.hpp"

#include <cstdint>
#include <optional>

namespace urank {

struct EmpiricalBayesOptions {
  int rank = 32;
  FitOptions fit;
  std::uint64_t seed = 0;
  int max_outer = 20;
  double rel_tol = 1e-5;
  /// Precision on the scalar rho_0 of the BBL baselines (kept fixed).
  double scalar_rho_precision = 1e-8;
  /// Starting precision; defaults to the total impression count.
  std::optional<double> initial_c;
};

/// Alternates MAP fitting, the low-rank Laplace step and the closed-form
/// hyperparameter update until the marginal NLL settles.
PosteriorModel fit_model(const Dataset& data, ModelKind kind, const EmpiricalBayesOptions& opts);

/// The proposed model (contextual dispersion, Laplace posterior).
PosteriorModel fit_empirical_bayes(const Dataset& data, int k, const FitOptions& opts, std::uint64_t seed);

} // namespace urank
