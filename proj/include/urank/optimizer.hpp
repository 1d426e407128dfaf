#pragma once

#include "urank/errors.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace urank {

struct ArmijoParams {
  double c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
};

struct FitOptions {
  double grad_tol = 1e-6;
  int max_iter = 500;
  int memory = 10;
  ArmijoParams line_search;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

enum class OptimizerStatus {
  converged, ///< gradient test met
  max_iter,  ///< iteration cap reached; best iterate returned
  stalled,   ///< no further decrease representable in floating point
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  OptimizerStatus status = OptimizerStatus::converged;
  std::vector<double> accepted_values; ///< objective after each accepted step, starting at x0
  bool converged() const { return status == OptimizerStatus::converged; }
};

/// Line search exhausted its backtracking budget away from the rounding floor.
class OptimizationError : public NumericError {
public:
  OptimizationError(const std::string& what, Eigen::VectorXd last_iterate)
      : NumericError(what), last_iterate_(std::move(last_iterate)) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

private:
  Eigen::VectorXd last_iterate_;
};

/// f(x, grad) returns the value and writes the gradient when grad != nullptr.
using ObjectiveFunction = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Limited-memory BFGS with Armijo backtracking. Stops when
/// ||g||_inf <= grad_tol * max(1, |f|).
///
/// Once the predicted decrease falls below the rounding floor of f
/// (64 eps max(1, |f|)), a step is also accepted if f moves by no more than
/// that floor and |g^T p| shrinks by a factor 0.9, so accepted values are
/// non-increasing up to that floor.
OptimizerResult minimize_lbfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const FitOptions& opts);

} // namespace urank
