#include "urank/baselines.hpp"

namespace urank {
namespace {

EmpiricalBayesOptions options(double c, int k, const FitOptions& opts, std::uint64_t seed) {
  EmpiricalBayesOptions eb;
  eb.rank = k;
  eb.fit = opts;
  eb.seed = seed;
  eb.initial_c = c;
  return eb;
}

} // namespace

PosteriorModel fit_logistic(const Dataset& data, double c, bool laplace, int k, const FitOptions& opts,
                            std::uint64_t seed) {
  return fit_model(data, laplace ? ModelKind::l_log : ModelKind::m_log, options(c, k, opts, seed));
}

PosteriorModel fit_bbl_scalar(const Dataset& data, double c, bool laplace, int k, const FitOptions& opts,
                              std::uint64_t seed) {
  return fit_model(data, laplace ? ModelKind::l_bbl : ModelKind::m_bbl, options(c, k, opts, seed));
}

} // namespace urank
