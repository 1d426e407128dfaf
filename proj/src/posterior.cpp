#include "urank/posterior.hpp"

#include "urank/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace urank {

void LowRankGaussianBlock::validate() const {
  if (V.rows() != mean.size() || V.cols() != lambda.size()) {
    throw InputError("posterior block shape mismatch: mean " + std::to_string(mean.size()) + ", V " +
                     std::to_string(V.rows()) + "x" + std::to_string(V.cols()) + ", lambda " +
                     std::to_string(lambda.size()));
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("posterior block precision must be positive");
  for (Eigen::Index l = 0; l < lambda.size(); ++l) {
    if (!(lambda[l] > 0.0) || !std::isfinite(lambda[l])) throw InputError("lambda must be positive");
    if (l > 0 && lambda[l] > lambda[l - 1]) throw InputError("lambda must be non-increasing");
  }
  if (lambda.size() > 0) {
    const Eigen::MatrixXd gram = V.transpose() * V;
    const double err = (gram - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-8) throw InputError("V columns are not orthonormal (error " + std::to_string(err) + ")");
  }
}

namespace {

template <class A>
bool same(const A& a, const A& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

} // namespace

bool operator==(const LowRankGaussianBlock& a, const LowRankGaussianBlock& b) {
  return a.c == b.c && same(a.mean, b.mean) && same(a.V, b.V) && same(a.lambda, b.lambda);
}

namespace {

double woodbury(const LowRankGaussianBlock& b, double norm_sq, const Eigen::VectorXd& y) {
  double shrink = 0.0;
  for (Eigen::Index l = 0; l < y.size(); ++l) shrink += b.lambda[l] / (b.lambda[l] + b.c) * y[l] * y[l];
  return std::max(0.0, (norm_sq - shrink) / b.c);
}

} // namespace

double covariance_quadform(const LowRankGaussianBlock& block, const SparseVector& x) {
  if (x.dim() != block.dim()) {
    throw InputError("context dimension " + std::to_string(x.dim()) + " does not match block dimension " +
                     std::to_string(block.dim()));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(block.rank());
  const auto idx = x.indices();
  const auto val = x.values();
  for (std::size_t t = 0; t < idx.size(); ++t) y += val[t] * block.V.row(idx[t]).transpose();
  return woodbury(block, x.squared_norm(), y);
}

double covariance_quadform(const LowRankGaussianBlock& block, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(block.dim())) throw InputError("dimension mismatch in quadform");
  return woodbury(block, x.squaredNorm(), block.V.transpose() * x);
}

WeightedDesign weighted_design(const SparseDesign& x, std::span<const double> h) {
  if (h.size() != x.rows()) throw InputError("one curvature value per row required");
  WeightedDesign out;
  out.total = h.size();
  std::vector<double> factors(h.size());
  for (std::size_t r = 0; r < h.size(); ++r) {
    if (h[r] > 0.0) {
      factors[r] = std::sqrt(h[r]);
    } else {
      factors[r] = 0.0;
      ++out.clamped;
    }
  }
  out.rows = x.scaled_rows(factors);
  return out;
}

WeightedDesign weighted_design(const Dataset& data, const CoefficientPair& w_hat, CoefficientBlock block) {
  const Objective obj(data, Likelihood::beta_binomial);
  const std::vector<double> h = obj.curvature(pack(w_hat), block == CoefficientBlock::beta ? 0 : 1);
  return weighted_design(data.contexts, h);
}

namespace {

double log_det_term(std::span<const double> lambda, double c) {
  double s = 0.0;
  for (double l : lambda) s += std::log1p(l / c);
  return 0.5 * s;
}

} // namespace

double marginal_nll(const Dataset& data, const CoefficientPair& w_hat, std::span<const double> lambda_beta,
                    std::span<const double> lambda_rho, const PriorPrecisions& c) {
  return loss(data, w_hat, c) + log_det_term(lambda_beta, c.c_beta) + log_det_term(lambda_rho, c.c_rho);
}

double marginal_nll(const Objective& objective, const Eigen::VectorXd& w_hat,
                    std::span<const std::vector<double>> lambdas, std::span<const double> precisions) {
  if (lambdas.size() != precisions.size()) throw InputError("one lambda list per block required");
  double value = objective.evaluate(w_hat, precisions, nullptr);
  for (std::size_t b = 0; b < lambdas.size(); ++b) value += log_det_term(lambdas[b], precisions[b]);
  return value;
}

double update_hyperparameter(double norm_sq, std::span<const double> lambda) {
  if (!(norm_sq >= 0.0) || !std::isfinite(norm_sq)) throw InputError("norm_sq must be finite and non-negative");
  // The objective is convex in c; its derivative times c is
  // norm_sq * c - sum lambda / (c + lambda), increasing in c.
  auto slope = [&](double c) {
    double s = norm_sq * c;
    for (double l : lambda) s -= l / (c + l);
    return s;
  };
  double lo = kMinPrecision;
  double hi = kMaxPrecision;
  if (slope(lo) >= 0.0) return lo;
  if (slope(hi) <= 0.0) return hi;
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (slope(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::prop: return "prop";
  case ModelKind::m_prop: return "m-prop";
  case ModelKind::m_log: return "m-log";
  case ModelKind::l_log: return "l-log";
  case ModelKind::m_bbl: return "m-bbl";
  case ModelKind::l_bbl: return "l-bbl";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "prop" || name == "l-prop") return ModelKind::prop;
  if (name == "m-prop") return ModelKind::m_prop;
  if (name == "m-log") return ModelKind::m_log;
  if (name == "l-log") return ModelKind::l_log;
  if (name == "m-bbl") return ModelKind::m_bbl;
  if (name == "l-bbl") return ModelKind::l_bbl;
  throw InputError("unknown model kind '" + name + "' (valid: prop, m-prop, m-log, l-log, m-bbl, l-bbl)");
}

Dispersion dispersion_of(ModelKind kind) {
  switch (kind) {
  case ModelKind::prop:
  case ModelKind::m_prop: return Dispersion::contextual;
  case ModelKind::m_bbl:
  case ModelKind::l_bbl: return Dispersion::scalar;
  case ModelKind::m_log:
  case ModelKind::l_log: return Dispersion::none;
  }
  throw std::logic_error("unknown model kind");
}

bool is_point_estimate(ModelKind kind) {
  return kind == ModelKind::m_prop || kind == ModelKind::m_log || kind == ModelKind::m_bbl;
}

void PosteriorModel::check_context(const SparseVector& x) const {
  if (x.dim() != dim) {
    throw InputError("context dimension " + std::to_string(x.dim()) + " does not match model dimension " +
                     std::to_string(dim));
  }
}

double PosteriorModel::zeta_mean(const SparseVector& x) const {
  check_context(x);
  return x.dot(beta_block.mean);
}

double PosteriorModel::eta_mean(const SparseVector& x) const {
  check_context(x);
  switch (dispersion()) {
  case Dispersion::contextual: return x.dot(rho_block.mean);
  case Dispersion::scalar: return rho_block.mean[0];
  case Dispersion::none: break;
  }
  throw InputError("model kind " + to_string(kind) + " has no dispersion coefficients");
}

double PosteriorModel::sigma_beta(const SparseVector& x) const {
  check_context(x);
  if (is_point_estimate(kind)) return 0.0;
  return std::sqrt(covariance_quadform(beta_block, x));
}

double PosteriorModel::sigma_rho(const SparseVector& x) const {
  check_context(x);
  if (is_point_estimate(kind)) return 0.0;
  switch (dispersion()) {
  case Dispersion::contextual: return std::sqrt(covariance_quadform(rho_block, x));
  case Dispersion::scalar: return std::sqrt(covariance_quadform(rho_block, Eigen::VectorXd::Ones(1).eval()));
  case Dispersion::none: break;
  }
  throw InputError("model kind " + to_string(kind) + " has no dispersion coefficients");
}

bool same_parameters(const PosteriorModel& a, const PosteriorModel& b) {
  return a.kind == b.kind && a.dim == b.dim && a.rank == b.rank && a.beta_block == b.beta_block &&
         a.rho_block == b.rho_block;
}

} // namespace urank
