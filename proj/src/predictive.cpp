#include "urank/predictive.hpp"

#include "urank/errors.hpp"
#include "urank/specfun.hpp"

#include <cmath>
#include <limits>

namespace urank {

AlphaTriple PredictorSamples::alphas(std::size_t t) const { return alphas_from_predictors(zeta[t], eta[t]); }

PredictorSamples sample_linear_predictors(const PosteriorModel& model, const SparseVector& x, std::size_t m,
                                          std::uint64_t seed) {
  if (m < 1) throw InputError("sample count must be at least 1");
  model.check_context(x);
  const bool disp = model.dispersion() != Dispersion::none;
  const double zeta0 = model.zeta_mean(x);
  const double sb = model.sigma_beta(x);
  const double eta0 = disp ? model.eta_mean(x) : 0.0;
  const double sr = disp ? model.sigma_rho(x) : 0.0;

  PredictorSamples out;
  out.seed = seed;
  out.zeta.resize(m);
  if (disp) out.eta.resize(m);
  if (sb == 0.0 && sr == 0.0) {
    std::fill(out.zeta.begin(), out.zeta.end(), zeta0);
    std::fill(out.eta.begin(), out.eta.end(), eta0);
    return out;
  }

  constexpr double tiny = std::numeric_limits<double>::epsilon() / 2;
  const double shift = 0.5 / static_cast<double>(m);
  auto to_open = [&](double u) {
    u += shift;
    if (u >= 1.0) u -= 1.0;
    return std::clamp(u, tiny, 1.0 - tiny);
  };
  const auto points = specfun::sobol_pairs(m, seed);
  for (std::size_t t = 0; t < m; ++t) {
    out.zeta[t] = zeta0 + sb * specfun::normal_quantile(to_open(points[t][0]));
    if (disp) out.eta[t] = eta0 + sr * specfun::normal_quantile(to_open(points[t][1]));
  }
  return out;
}

std::vector<double> predictive_density(const PredictorSamples& samples, std::span<const double> theta) {
  if (!samples.has_dispersion()) throw InputError("predictive density needs a dispersion block");
  if (samples.m() == 0) throw InputError("no samples");
  std::vector<double> out(theta.size(), 0.0);
  for (std::size_t g = 0; g < theta.size(); ++g) {
    const double th = theta[g];
    if (!(th > 0.0 && th < 1.0)) throw DomainError("density grid point " + std::to_string(th) + " outside (0, 1)");
    double s = 0.0;
    for (std::size_t t = 0; t < samples.m(); ++t) {
      const AlphaTriple a = samples.alphas(t);
      s += std::exp(specfun::beta_log_pdf(th, a.alpha_plus, a.alpha_minus));
    }
    out[g] = s / static_cast<double>(samples.m());
  }
  return out;
}

} // namespace urank
