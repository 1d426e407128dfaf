#include "urank/scoring.hpp"

#include "urank/errors.hpp"
#include "urank/parallel.hpp"
#include "urank/specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace urank {

std::string to_string(Measure m) {
  switch (m) {
  case Measure::ucbe: return "UCBE";
  case Measure::ucqe: return "UCQE";
  case Measure::euq: return "EUQ";
  case Measure::ucquq: return "UCQUQ";
  case Measure::uqp: return "UQP";
  }
  return "?";
}

Measure parse_measure(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (Measure m : {Measure::ucbe, Measure::ucqe, Measure::euq, Measure::ucquq, Measure::uqp}) {
    if (to_string(m) == up) return m;
  }
  throw InputError("unknown measure '" + name + "' (valid: UCBE, UCQE, EUQ, UCQUQ, UQP)");
}

void ScoreSpec::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw InputError("nu must lie in (0, 1)");
  if (measure == Measure::ucquq) {
    if (!nu2) throw InputError("UCQUQ needs nu2");
    if (!(*nu2 > 0.0 && *nu2 < 1.0)) throw InputError("nu2 must lie in (0, 1)");
  } else if (nu2) {
    throw InputError("nu2 applies to UCQUQ only");
  }
  if (m < 1) throw InputError("sample count must be at least 1");
  if (measure == Measure::ucbe && m < 2) throw InputError("UCBE needs at least 2 samples");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");
}

namespace {

// Mean accumulated as f(x_0) + mean of deviations, so identical inputs give
// f(x_0) exactly.
template <class F>
double shifted_mean(const std::vector<double>& xs, F f) {
  const double base = f(xs[0]);
  double dev = 0.0;
  for (double x : xs) dev += f(x) - base;
  return base + dev / static_cast<double>(xs.size());
}

} // namespace

double ucbe(const PredictorSamples& samples, double nu) {
  const std::size_t m = samples.m();
  if (m < 2) throw InputError("UCBE needs at least 2 samples");
  const double mean = shifted_mean(samples.zeta, [](double z) { return sigmoid(z); });
  double ss = 0.0;
  for (double z : samples.zeta) {
    const double dev = sigmoid(z) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (sd == 0.0) return mean;
  return mean + specfun::normal_quantile(nu) * sd;
}

double ucqe(const PosteriorModel& model, const SparseVector& x, double nu) {
  const double z = model.zeta_mean(x);
  const double s = model.sigma_beta(x);
  if (s == 0.0) return sigmoid(z);
  return sigmoid(z + specfun::normal_quantile(nu) * s);
}

double sample_quantile(const PredictorSamples& samples, std::size_t t, double nu) {
  if (!samples.has_dispersion()) return sigmoid(samples.zeta[t]);
  const AlphaTriple a = samples.alphas(t);
  return specfun::beta_quantile(nu, a.alpha_plus, a.alpha_minus);
}

namespace {

std::vector<double> quantiles(const PredictorSamples& samples, double nu) {
  std::vector<double> q(samples.m());
  for (std::size_t t = 0; t < samples.m(); ++t) {
    // Identical consecutive samples share one quantile evaluation.
    const bool repeat = t > 0 && samples.zeta[t] == samples.zeta[t - 1] &&
                        (!samples.has_dispersion() || samples.eta[t] == samples.eta[t - 1]);
    q[t] = repeat ? q[t - 1] : sample_quantile(samples, t, nu);
  }
  return q;
}

double mixture_cdf(const PredictorSamples& samples, double theta) {
  double s = 0.0;
  for (std::size_t t = 0; t < samples.m(); ++t) {
    if (samples.has_dispersion()) {
      const AlphaTriple a = samples.alphas(t);
      s += specfun::beta_cdf(theta, a.alpha_plus, a.alpha_minus);
    } else {
      s += sigmoid(samples.zeta[t]) <= theta ? 1.0 : 0.0;
    }
  }
  return s / static_cast<double>(samples.m());
}

} // namespace

double euq(const PredictorSamples& samples, double nu) {
  if (samples.m() < 1) throw InputError("EUQ needs at least one sample");
  const auto q = quantiles(samples, nu);
  return shifted_mean(q, [](double v) { return v; });
}

double ucquq(const PredictorSamples& samples, double nu1, double nu2) {
  if (samples.m() < 1) throw InputError("UCQUQ needs at least one sample");
  auto q = quantiles(samples, nu1);
  std::sort(q.begin(), q.end());
  const auto m = static_cast<double>(q.size());
  auto rank = static_cast<std::size_t>(std::ceil(nu2 * m));
  rank = std::clamp<std::size_t>(rank, 1, q.size());
  return q[rank - 1];
}

double uqp(const PredictorSamples& samples, double nu, double tol) {
  if (samples.m() < 1) throw InputError("UQP needs at least one sample");
  if (!(tol > 0.0)) throw InputError("UQP tolerance must be positive");
  if (!(nu > 0.0 && nu < 1.0)) throw DomainError("nu must lie in (0, 1)");
  // Bisection on the logit scale, so quantiles far below 1e-12 (tiny alpha+)
  // are reachable; theta spans the smallest subnormal to the largest double
  // below one.
  const auto theta_of = [](double u) {
    const double t = u < 0.0 ? std::exp(u) / (1.0 + std::exp(u)) : 1.0 / (1.0 + std::exp(-u));
    return std::clamp(t, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
  };
  double lo = -745.0;
  double hi = 37.0;
  double f_lo = mixture_cdf(samples, theta_of(lo)) - nu;
  double f_hi = mixture_cdf(samples, theta_of(hi)) - nu;
  if (f_lo >= 0.0) return theta_of(lo);
  if (f_hi <= 0.0) return theta_of(hi);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t = theta_of(mid);
    if (t == theta_of(lo) || t == theta_of(hi)) break; // adjacent doubles
    const double f = mixture_cdf(samples, t) - nu;
    if (std::abs(f) <= tol) return t;
    if (f < 0.0) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  return -f_lo <= f_hi ? theta_of(lo) : theta_of(hi);
}

double score(const PosteriorModel& model, const SparseVector& x, const ScoreSpec& spec, std::uint64_t seed) {
  if (spec.measure == Measure::ucqe) return ucqe(model, x, spec.nu);
  const PredictorSamples s = sample_linear_predictors(model, x, spec.m, seed);
  switch (spec.measure) {
  case Measure::ucbe: return ucbe(s, spec.nu);
  case Measure::euq: return euq(s, spec.nu);
  case Measure::ucquq: return ucquq(s, spec.nu, *spec.nu2);
  case Measure::uqp: return uqp(s, spec.nu, spec.tol);
  case Measure::ucqe: break;
  }
  return ucqe(model, x, spec.nu);
}

std::vector<ScoredItem> score_batch(const PosteriorModel& model,
                                    const std::vector<std::pair<std::string, SparseVector>>& contexts,
                                    const ScoreSpec& spec) {
  spec.validate();
  std::vector<ScoredItem> out(contexts.size());
  parallel::for_each_index(static_cast<std::int64_t>(contexts.size()), [&](std::int64_t i) {
    const auto& [id, x] = contexts[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = {id, score(model, x, spec, spec.seed ^ static_cast<std::uint64_t>(i))};
    } catch (const InputError& e) {
      throw InputError("scoring '" + id + "': " + e.what());
    } catch (const NumericError& e) {
      throw NumericError("scoring '" + id + "': " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("scoring '" + id + "': " + e.what());
    }
  });
  std::sort(out.begin(), out.end(), [](const ScoredItem& a, const ScoredItem& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string format_scores(const std::vector<ScoredItem>& scores, const ScoreSpec& spec) {
  std::ostringstream out;
  out << "# measure=" << to_string(spec.measure) << " nu=" << number(spec.nu)
      << " nu2=" << (spec.nu2 ? number(*spec.nu2) : std::string("none")) << " m=" << spec.m << " seed=" << spec.seed
      << "\n";
  out << "id\tscore\n";
  for (const auto& [id, s] : scores) out << id << '\t' << number(s) << '\n';
  return out.str();
}

std::vector<ScoredItem> parse_scores(const std::string& text, const std::string& source) {
  std::vector<ScoredItem> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "id\tscore") throw InputError(source + ":" + std::to_string(lineno) + ": expected header 'id\\tscore'");
      header = true;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw InputError(source + ":" + std::to_string(lineno) + ": expected two columns");
    double v = 0.0;
    const char* begin = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
      throw InputError(source + ":" + std::to_string(lineno) + ":" + std::to_string(tab + 2) + ": cannot parse score");
    }
    out.emplace_back(line.substr(0, tab), v);
  }
  if (!header) throw InputError(source + ": missing header");
  return out;
}

} // namespace urank
