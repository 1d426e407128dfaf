#pragma once

#include "urank/dataset.hpp"
#include "urank/model.hpp"
#include "urank/objective.hpp"
#include "urank/optimizer.hpp"

#include <Eigen/Dense>

#include <span>

namespace urank {

inline constexpr double kMinPrecision = 1e-8;
inline constexpr double kMaxPrecision = 1e12;

struct PriorPrecisions {
  double c_beta = 1.0;
  double c_rho = 1.0;

  /// Both precisions within [kMinPrecision, kMaxPrecision].
  void validate() const;
};

/// Concatenation (beta ; rho) and its inverse.
Eigen::VectorXd pack(const CoefficientPair& w);
CoefficientPair unpack(const Eigen::VectorXd& v, Index dim);

/// Penalized negative joint log-likelihood of the proposed model. Precisions
/// of zero are accepted here (an unpenalized evaluation).
double loss(const Dataset& data, const CoefficientPair& w, const PriorPrecisions& c);
Eigen::VectorXd gradient(const Dataset& data, const CoefficientPair& w, const PriorPrecisions& c);

struct FitResult {
  CoefficientPair w;
  double loss = 0.0;
  int iterations = 0;
  OptimizerStatus status = OptimizerStatus::converged;
  std::vector<double> loss_trace;
  bool warning() const { return status != OptimizerStatus::converged; }
};

FitResult fit_map(const Dataset& data, const PriorPrecisions& c, const FitOptions& opts, const CoefficientPair& w0);

/// MAP fit of any Objective (used for the baselines and the empirical-Bayes loop).
OptimizerResult fit_penalized(const Objective& objective, std::span<const double> precisions, const FitOptions& opts,
                              Eigen::VectorXd w0);

} // namespace urank
