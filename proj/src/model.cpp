#include "urank/model.hpp"

#include "urank/errors.hpp"
#include "urank/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace urank {
namespace {

void check_counts(std::int64_t v, std::int64_t n) {
  if (v < 0 || n < 0 || v > n) {
    throw DomainError("beta-binomial counts need 0 <= v <= n, got v=" + std::to_string(v) + ", n=" + std::to_string(n));
  }
}

double clamp_predictor(double z) { return std::clamp(z, -kPredictorClamp, kPredictorClamp); }

void check_dims(const CoefficientPair& w, const SparseVector& x) {
  if (w.beta.size() != static_cast<Eigen::Index>(x.dim()) || w.rho.size() != w.beta.size()) {
    throw InputError("dimension mismatch: coefficients " + std::to_string(w.beta.size()) + "/" +
                     std::to_string(w.rho.size()) + ", context " + std::to_string(x.dim()));
  }
}

} // namespace

AlphaTriple make_alpha_triple(double alpha_plus, double alpha_minus) {
  return {alpha_plus, alpha_minus, alpha_plus + alpha_minus};
}

AlphaTriple alphas_from_predictors(double zeta, double eta) {
  return make_alpha_triple(std::exp(clamp_predictor(zeta + eta)), std::exp(clamp_predictor(eta)));
}

AlphaTriple alphas(const CoefficientPair& w, const SparseVector& x) {
  check_dims(w, x);
  return alphas_from_predictors(x.dot(w.beta), x.dot(w.rho));
}

double log_bb_pmf(std::int64_t v, std::int64_t n, const AlphaTriple& a) {
  check_counts(v, n);
  using specfun::log_gamma_ratio;
  return (log_gamma_ratio(a.alpha_plus, v) + log_gamma_ratio(a.alpha_minus, n - v)) - log_gamma_ratio(a.alpha, n);
}

LocalDerivatives local_derivatives(std::int64_t v, std::int64_t n, const AlphaTriple& a) {
  check_counts(v, n);
  using specfun::PolygammaOrder;
  using specfun::polygamma_diff;
  const double ap = a.alpha_plus;
  const double am = a.alpha_minus;
  const double al = a.alpha;

  const double dg_plus = polygamma_diff(ap, v, PolygammaOrder::digamma);
  const double dg_minus = polygamma_diff(am, n - v, PolygammaOrder::digamma);
  const double dg_all = polygamma_diff(al, n, PolygammaOrder::digamma);
  const double tg_plus = polygamma_diff(ap, v, PolygammaOrder::trigamma);
  const double tg_minus = polygamma_diff(am, n - v, PolygammaOrder::trigamma);
  const double tg_all = polygamma_diff(al, n, PolygammaOrder::trigamma);

  LocalDerivatives d;
  d.g_beta = -ap * (dg_plus - dg_all);
  d.g_rho = -ap * dg_plus - am * dg_minus + al * dg_all;
  d.h_beta = -ap * ap * (tg_plus - tg_all) + d.g_beta;
  d.h_beta_rho = -ap * ap * tg_plus + al * ap * tg_all + d.g_beta;
  d.h_rho = -ap * ap * tg_plus - am * am * tg_minus + al * al * tg_all + d.g_rho;
  return d;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double beta_mean(const CoefficientPair& w, const SparseVector& x) {
  check_dims(w, x);
  return sigmoid(x.dot(w.beta));
}

} // namespace urank
