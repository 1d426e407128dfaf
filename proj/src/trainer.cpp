#include "urank/trainer.hpp"

#include "urank/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace urank {

void PriorPrecisions::validate() const {
  for (double c : {c_beta, c_rho}) {
    if (!(c >= kMinPrecision && c <= kMaxPrecision)) {
      throw InputError("prior precision " + std::to_string(c) + " outside [1e-8, 1e12]");
    }
  }
}

Eigen::VectorXd pack(const CoefficientPair& w) {
  Eigen::VectorXd v(w.beta.size() + w.rho.size());
  v << w.beta, w.rho;
  return v;
}

CoefficientPair unpack(const Eigen::VectorXd& v, Index dim) {
  if (v.size() != 2 * static_cast<Eigen::Index>(dim)) throw InputError("packed coefficient size mismatch");
  return {v.head(dim), v.tail(dim)};
}

namespace {

void check_pair(const Dataset& data, const CoefficientPair& w) {
  if (w.beta.size() != static_cast<Eigen::Index>(data.dim) || w.rho.size() != static_cast<Eigen::Index>(data.dim)) {
    throw InputError("coefficient dimension " + std::to_string(w.beta.size()) + "/" + std::to_string(w.rho.size()) +
                     " does not match data dimension " + std::to_string(data.dim));
  }
}

std::array<double, 2> precisions(const PriorPrecisions& c) {
  if (!(c.c_beta >= 0.0) || !(c.c_rho >= 0.0) || !std::isfinite(c.c_beta) || !std::isfinite(c.c_rho)) {
    throw InputError("prior precisions must be finite and non-negative");
  }
  return {c.c_beta, c.c_rho};
}

} // namespace

double loss(const Dataset& data, const CoefficientPair& w, const PriorPrecisions& c) {
  check_pair(data, w);
  const Objective obj(data, Likelihood::beta_binomial);
  return obj.evaluate(pack(w), precisions(c), nullptr);
}

Eigen::VectorXd gradient(const Dataset& data, const CoefficientPair& w, const PriorPrecisions& c) {
  check_pair(data, w);
  const Objective obj(data, Likelihood::beta_binomial);
  Eigen::VectorXd g;
  obj.evaluate(pack(w), precisions(c), &g);
  return g;
}

OptimizerResult fit_penalized(const Objective& objective, std::span<const double> precisions, const FitOptions& opts,
                              Eigen::VectorXd w0) {
  const std::vector<double> prec(precisions.begin(), precisions.end());
  return minimize_lbfgs([&](const Eigen::VectorXd& w, Eigen::VectorXd* g) { return objective.evaluate(w, prec, g); },
                        std::move(w0), opts);
}

FitResult fit_map(const Dataset& data, const PriorPrecisions& c, const FitOptions& opts, const CoefficientPair& w0) {
  c.validate();
  check_pair(data, w0);
  if (!w0.beta.allFinite() || !w0.rho.allFinite()) throw InputError("initial coefficients are not finite");
  const Objective obj(data, Likelihood::beta_binomial);
  const std::array<double, 2> prec{c.c_beta, c.c_rho};
  OptimizerResult r = fit_penalized(obj, prec, opts, pack(w0));
  FitResult out;
  out.w = unpack(r.x, data.dim);
  out.loss = r.value;
  out.iterations = r.iterations;
  out.status = r.status;
  out.loss_trace = std::move(r.accepted_values);
  return out;
}

} // namespace urank
