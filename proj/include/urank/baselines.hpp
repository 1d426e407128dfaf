#pragma once

#include "urank/empirical_bayes.hpp"

namespace urank {

/// L2-regularized logistic regression on (n, v) treated as n Bernoulli
/// trials. With `laplace` the beta block carries the low-rank posterior
/// (L-Log), otherwise the model is a MAP point estimate (M-Log). `c` is the
/// starting precision of the empirical-Bayes loop.
PosteriorModel fit_logistic(const Dataset& data, double c, bool laplace, int k, const FitOptions& opts,
                            std::uint64_t seed);

/// Beta-binomial regression with a single dispersion scalar rho_0
/// (M-BBL / L-BBL). rho_0 has the fixed near-flat precision
/// EmpiricalBayesOptions::scalar_rho_precision.
PosteriorModel fit_bbl_scalar(const Dataset& data, double c, bool laplace, int k, const FitOptions& opts,
                              std::uint64_t seed);

} // namespace urank
