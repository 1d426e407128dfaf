#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace urank::specfun {

enum class PolygammaOrder { digamma, trigamma };

/// ln Gamma(u) for u > 0.
double log_gamma(double u);

/// Psi(u) and Psi'(u) for u > 0.
double digamma(double u);
double trigamma(double u);

/// Psi(a + count) - Psi(a), or Psi'(a + count) - Psi'(a) for the trigamma order.
///
/// Counts up to kPolygammaCrossover are summed exactly from the recurrence
/// (1/(a+t) terms); larger counts switch to asymptotic evaluation at both ends.
double polygamma_diff(double a, std::int64_t count, PolygammaOrder order);

inline constexpr std::int64_t kPolygammaCrossover = 64;

/// ln Gamma(a + count) - ln Gamma(a), same crossover rule as polygamma_diff.
double log_gamma_ratio(double a, std::int64_t count);

/// ln B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_theta(a1, a2).
double beta_cdf(double theta, double a1, double a2);

/// Beta density; infinite at the boundary when a parameter is below one.
double beta_pdf(double theta, double a1, double a2);
double beta_log_pdf(double theta, double a1, double a2);

/// Inverse of beta_cdf in theta. Safeguarded Newton with bisection fallback.
double beta_quantile(double nu, double a1, double a2);

/// Standard normal CDF and its inverse.
double normal_cdf(double x);
double normal_quantile(double nu);

/// Two-dimensional Sobol points. seed == 0 gives the plain sequence; any
/// other seed applies a digital (XOR) scramble derived from it.
std::vector<std::array<double, 2>> sobol_pairs(std::size_t m, std::uint64_t seed);

} // namespace urank::specfun
