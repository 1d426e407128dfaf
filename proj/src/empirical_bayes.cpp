#include "urank/empirical_bayes.hpp"

#include "urank/errors.hpp"
#include "urank/thin_svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace urank {
namespace {

Likelihood likelihood_of(ModelKind kind) {
  return dispersion_of(kind) == Dispersion::none ? Likelihood::binomial_logit : Likelihood::beta_binomial;
}

struct BlockFactor {
  ThinSvd svd;
  double clamped_fraction = 0.0;
};

BlockFactor factor_block(const Objective& obj, const Eigen::VectorXd& w, int block, int k, std::uint64_t seed) {
  const std::vector<double> h = obj.curvature(w, block);
  const WeightedDesign wd = weighted_design(obj.design(block), h);
  const auto limit = std::min<std::int64_t>(obj.block_size(block), static_cast<std::int64_t>(wd.rows.rows()));
  const int k_eff = static_cast<int>(std::min<std::int64_t>(k, limit));
  return {thin_svd(wd.rows, k_eff, seed), wd.clamped_fraction()};
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

PosteriorModel fit_model(const Dataset& data, ModelKind kind, const EmpiricalBayesOptions& opts) {
  opts.fit.validate();
  if (data.size() == 0) throw InputError("cannot fit a model to an empty dataset");
  if (opts.rank < 0) throw InputError("rank must be non-negative");
  if (opts.max_outer < 1) throw InputError("max_outer must be at least 1");

  const Dispersion disp = dispersion_of(kind);
  const Objective obj(data, likelihood_of(kind), disp == Dispersion::scalar);
  const int blocks = obj.block_count();
  // Blocks whose precision is tuned by empirical Bayes; the scalar rho_0 stays fixed.
  auto tuned = [&](int b) { return b == 0 || disp == Dispersion::contextual; };

  const double c0 = std::clamp(opts.initial_c.value_or(static_cast<double>(data.total_impressions())), kMinPrecision,
                               kMaxPrecision);
  std::vector<double> prec(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) prec[b] = tuned(b) ? c0 : opts.scalar_rho_precision;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(obj.parameter_size());
  PosteriorModel model;
  model.kind = kind;
  model.dim = data.dim;
  model.rank = opts.rank;
  FitDiagnostics& diag = model.diagnostics;

  std::vector<BlockFactor> factors;
  std::vector<double> final_prec;
  double previous = 0.0;
  for (int t = 0; t < opts.max_outer; ++t) {
    OptimizerResult fit;
    try {
      fit = fit_penalized(obj, prec, opts.fit, w);
    } catch (const OptimizationError& e) {
      throw OptimizationError(std::string(e.what()) + " (outer iteration " + std::to_string(t) + ")",
                              e.last_iterate());
    }
    w = fit.x;
    diag.map_warning = diag.map_warning || !fit.converged();

    factors.clear();
    std::vector<std::vector<double>> lambdas;
    for (int b = 0; b < blocks; ++b) {
      factors.push_back(factor_block(obj, w, b, opts.rank, opts.seed));
      lambdas.push_back(to_std(factors.back().svd.lambda));
    }
    const double m = marginal_nll(obj, w, lambdas, prec);
    if (!std::isfinite(m)) throw NumericError("non-finite marginal NLL at outer iteration " + std::to_string(t));
    diag.marginal_nll_trace.push_back(m);
    diag.c_beta_trace.push_back(prec[0]);
    if (blocks > 1) diag.c_rho_trace.push_back(prec[1]);
    diag.outer_iterations = t + 1;
    final_prec = prec;

    if (t > 0 && std::abs(m - previous) < opts.rel_tol * std::abs(m)) break;
    previous = m;
    if (t + 1 == opts.max_outer) break;

    for (int b = 0; b < blocks; ++b) {
      if (!tuned(b)) continue;
      const double norm_sq = w.segment(obj.block_offset(b), obj.block_size(b)).squaredNorm();
      prec[b] = update_hyperparameter(norm_sq, lambdas[b]);
    }
  }

  auto make_block = [&](int b) {
    LowRankGaussianBlock blk;
    blk.mean = w.segment(obj.block_offset(b), obj.block_size(b));
    blk.V = factors[b].svd.V;
    blk.lambda = factors[b].svd.lambda;
    blk.c = final_prec[b];
    return blk;
  };
  model.beta_block = make_block(0);
  diag.clamped_fraction_beta = factors[0].clamped_fraction;
  if (blocks > 1) {
    model.rho_block = make_block(1);
    diag.clamped_fraction_rho = factors[1].clamped_fraction;
  } else {
    model.rho_block.mean.resize(0);
    model.rho_block.V.resize(0, 0);
    model.rho_block.lambda.resize(0);
    model.rho_block.c = 1.0;
  }
  diag.final_marginal_nll = diag.marginal_nll_trace.back();
  return model;
}

PosteriorModel fit_empirical_bayes(const Dataset& data, int k, const FitOptions& opts, std::uint64_t seed) {
  EmpiricalBayesOptions eb;
  eb.rank = k;
  eb.fit = opts;
  eb.seed = seed;
  return fit_model(data, ModelKind::prop, eb);
}

} // namespace urank
