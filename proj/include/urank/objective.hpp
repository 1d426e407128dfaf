#pragma once

#include "urank/dataset.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace urank {

enum class Likelihood {
  beta_binomial,  ///< Beta-binomial with mean block and dispersion block
  binomial_logit, ///< n independent Bernoulli trials with logistic link
};

enum class Execution { parallel, serial };

/// Penalized negative log-likelihood over a dataset, shared by the proposed
/// model and the baselines.
///
/// The parameter vector is a concatenation of coefficient blocks. Block 0 is
/// always beta acting on the contexts. For the Beta-binomial likelihood block 1
/// is the dispersion block acting either on the contexts (contextual rho) or on
/// an intercept column (a single scalar rho_0).
class Objective {
public:
  Objective(const Dataset& data, Likelihood likelihood, bool scalar_dispersion = false,
            Execution execution = Execution::parallel);

  Likelihood likelihood() const { return likelihood_; }
  int block_count() const { return likelihood_ == Likelihood::beta_binomial ? 2 : 1; }
  bool scalar_dispersion() const { return scalar_dispersion_; }
  const SparseDesign& design(int block) const {
    return block == 1 && scalar_dispersion_ ? intercept_ : data_->contexts;
  }
  const Dataset& data() const { return *data_; }
  Eigen::Index block_offset(int block) const;
  Eigen::Index block_size(int block) const { return design(block).cols(); }
  Eigen::Index parameter_size() const;

  /// Data term plus sum_b (precision_b / 2) ||w_b||^2. `grad` is resized.
  double evaluate(const Eigen::VectorXd& w, std::span<const double> precisions, Eigen::VectorXd* grad) const;

  /// Per-record second derivative of the data term along block `block`
  /// (h^(beta), h^(rho) or n p (1 - p)).
  std::vector<double> curvature(const Eigen::VectorXd& w, int block) const;

  /// Linear predictors X_b w_b for every record.
  Eigen::VectorXd predictors(const Eigen::VectorXd& w, int block) const;

private:
  const Dataset* data_;
  Likelihood likelihood_;
  bool scalar_dispersion_;
  Execution execution_;
  SparseDesign intercept_;
};

} // namespace urank
