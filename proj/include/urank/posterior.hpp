#pragma once

#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/objective.hpp"
#include "urank/sparse.hpp"
#include "urank/trainer.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace urank {

/// Gaussian with mean `mean` and precision V diag(lambda) V^T + c I.
struct LowRankGaussianBlock {
  Eigen::VectorXd mean;
  Eigen::MatrixXd V;
  Eigen::VectorXd lambda;
  double c = 1.0;

  Index dim() const { return static_cast<Index>(mean.size()); }
  int rank() const { return static_cast<int>(lambda.size()); }
  /// Throws InputError if shapes disagree, V is not orthonormal to 1e-8, or
  /// lambda is not positive and non-increasing.
  void validate() const;
  /// Exact equality of every field (shapes included).
  friend bool operator==(const LowRankGaussianBlock& a, const LowRankGaussianBlock& b);
};

/// x^T (c I + V Lambda V^T)^{-1} x through the Woodbury identity.
double covariance_quadform(const LowRankGaussianBlock& block, const SparseVector& x);
double covariance_quadform(const LowRankGaussianBlock& block, const Eigen::VectorXd& x);

enum class CoefficientBlock { beta, rho };

struct WeightedDesign {
  SparseDesign rows;
  std::size_t clamped = 0; ///< records with h <= 0
  std::size_t total = 0;
  double clamped_fraction() const { return total == 0 ? 0.0 : static_cast<double>(clamped) / static_cast<double>(total); }
};

/// Rows sqrt(h) x for records with h > 0.
WeightedDesign weighted_design(const SparseDesign& x, std::span<const double> h);
WeightedDesign weighted_design(const Dataset& data, const CoefficientPair& w_hat, CoefficientBlock block);

/// L(w_hat) + 1/2 sum log(1 + lambda/c) over both blocks.
double marginal_nll(const Dataset& data, const CoefficientPair& w_hat, std::span<const double> lambda_beta,
                    std::span<const double> lambda_rho, const PriorPrecisions& c);
/// Same for any objective: one lambda list and precision per block.
double marginal_nll(const Objective& objective, const Eigen::VectorXd& w_hat,
                    std::span<const std::vector<double>> lambdas, std::span<const double> precisions);

/// argmin over c in [1e-8, 1e12] of c * norm_sq + sum log(1 + lambda/c).
double update_hyperparameter(double norm_sq, std::span<const double> lambda);

enum class ModelKind { prop, m_prop, m_log, l_log, m_bbl, l_bbl };

std::string to_string(ModelKind kind);
/// Accepts the CLI spellings: prop (alias l-prop), m-prop, m-log, l-log, m-bbl, l-bbl.
ModelKind parse_model_kind(const std::string& name);

enum class Dispersion { contextual, scalar, none };
Dispersion dispersion_of(ModelKind kind);
/// M-* models are MAP point estimates; their predictive spread is zero.
bool is_point_estimate(ModelKind kind);

struct FitDiagnostics {
  int outer_iterations = 0;
  std::vector<double> marginal_nll_trace;
  std::vector<double> c_beta_trace;
  std::vector<double> c_rho_trace;
  double clamped_fraction_beta = 0.0;
  double clamped_fraction_rho = 0.0;
  double final_marginal_nll = 0.0;
  bool map_warning = false;
};

/// Factorial Gaussian posterior over beta and the dispersion coefficients.
///
/// The beta block always has dimension d. The rho block has dimension d for
/// contextual dispersion, 1 for a scalar rho_0 and 0 for the logistic models.
struct PosteriorModel {
  ModelKind kind = ModelKind::prop;
  Index dim = 0;
  int rank = 0; ///< requested rank; blocks may hold fewer directions
  LowRankGaussianBlock beta_block;
  LowRankGaussianBlock rho_block;
  FitDiagnostics diagnostics; ///< not persisted

  Dispersion dispersion() const { return dispersion_of(kind); }
  /// beta_hat^T x and rho_hat^T x (or rho_0).
  double zeta_mean(const SparseVector& x) const;
  double eta_mean(const SparseVector& x) const;
  /// Posterior standard deviations of the two predictors; zero for M-* models.
  double sigma_beta(const SparseVector& x) const;
  double sigma_rho(const SparseVector& x) const;
  void check_context(const SparseVector& x) const;
};

bool same_parameters(const PosteriorModel& a, const PosteriorModel& b);

} // namespace urank
