#include "urank/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace urank {

void FitOptions::validate() const {
  if (!(grad_tol > 0.0) || !std::isfinite(grad_tol)) throw InputError("grad_tol must be positive");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (memory < 1) throw InputError("memory must be at least 1");
  if (!(line_search.c1 > 0.0 && line_search.c1 < 1.0)) throw InputError("Armijo c1 must lie in (0, 1)");
  if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0)) throw InputError("Armijo shrink must lie in (0, 1)");
  if (line_search.max_backtracks < 1) throw InputError("max_backtracks must be at least 1");
}

namespace {

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<Pair>& pairs, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const Pair& last = pairs.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double b = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - b) * pairs[i].s;
  }
  return -q;
}

bool gradient_small(const Eigen::VectorXd& g, double f, double tol) {
  return g.size() == 0 || g.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, std::abs(f));
}

} // namespace

OptimizerResult minimize_lbfgs(const ObjectiveFunction& f, Eigen::VectorXd x0, const FitOptions& opts) {
  opts.validate();
  if (!x0.allFinite()) throw InputError("initial point is not finite");

  OptimizerResult out;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g;
  double fx = f(x, &g);
  out.accepted_values.push_back(fx);

  std::deque<Pair> pairs;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (gradient_small(g, fx, opts.grad_tol)) {
      out.status = OptimizerStatus::converged;
      break;
    }
    Eigen::VectorXd p;
    double step = 1.0;
    if (pairs.empty()) {
      p = -g;
      step = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());
    } else {
      p = two_loop(pairs, g);
    }
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      pairs.clear();
      p = -g;
      step = 1.0 / std::max(1.0, g.lpNorm<Eigen::Infinity>());
      slope = g.dot(p);
    }

    const double initial_step = step;
    const double noise = 64.0 * eps * std::max(1.0, std::abs(fx));
    bool accepted = false;
    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new;
    double f_new = 0.0;
    for (int bt = 0; bt < opts.line_search.max_backtracks; ++bt) {
      x_new = x + step * p;
      if (x_new == x) break; // step below the resolution of x
      bool finite = true;
      try {
        f_new = f(x_new, &g_new);
      } catch (const NumericError&) {
        finite = false;
      }
      if (finite && std::isfinite(f_new) && f_new <= fx + opts.line_search.c1 * step * slope) {
        accepted = true;
        break;
      }
      // At the rounding floor of f the sufficient-decrease test is noise;
      // accept a step within that floor that flattens the directional derivative.
      if (finite && std::isfinite(f_new) && std::abs(f_new - fx) <= noise && std::abs(g_new.dot(p)) <= 0.9 * std::abs(slope)) {
        accepted = true;
        break;
      }
      step *= opts.line_search.shrink;
    }

    if (!accepted) {
      // Predicted decrease below what doubles can resolve: we are at the
      // numerical minimum along this direction.
      if (std::abs(slope) * initial_step < 64.0 * eps * std::max(1.0, std::abs(fx))) {
        out.status = OptimizerStatus::stalled;
        break;
      }
      if (pairs.empty()) {
        throw OptimizationError("line search failed after " + std::to_string(opts.line_search.max_backtracks) +
                                    " backtracks at iteration " + std::to_string(iter),
                                x);
      }
      pairs.clear();
      continue;
    }

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
    }
    x = std::move(x_new);
    g = std::move(g_new);
    fx = f_new;
    out.accepted_values.push_back(fx);
  }
  if (iter == opts.max_iter) {
    out.status = gradient_small(g, fx, opts.grad_tol) ? OptimizerStatus::converged : OptimizerStatus::max_iter;
  }

  out.x = std::move(x);
  out.value = fx;
  out.iterations = iter;
  return out;
}

} // namespace urank
