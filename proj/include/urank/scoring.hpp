#pragma once

#include "urank/posterior.hpp"
#include "urank/predictive.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace urank {

enum class Measure { ucbe, ucqe, euq, ucquq, uqp };

std::string to_string(Measure m);
/// Case-insensitive; InputError lists the valid names otherwise.
Measure parse_measure(const std::string& name);

struct ScoreSpec {
  Measure measure = Measure::ucqe;
  double nu = 0.95;
  std::optional<double> nu2; ///< UCQUQ only
  std::size_t m = kDefaultSamples;
  std::uint64_t seed = 0;
  double tol = 1e-8; ///< UQP bisection tolerance

  void validate() const;
};

/// Upper confidence bound on sigmoid(zeta): mean + Phi^{-1}(nu) * sd (m - 1
/// denominator). Not clamped to [0, 1].
double ucbe(const PredictorSamples& samples, double nu);
/// sigmoid(beta_hat^T x + Phi^{-1}(nu) sigma_beta(x)).
double ucqe(const PosteriorModel& model, const SparseVector& x, double nu);
/// Mean of the per-sample Beta quantiles.
double euq(const PredictorSamples& samples, double nu);
/// ceil(nu2 * m)-th smallest per-sample quantile at nu1.
double ucquq(const PredictorSamples& samples, double nu1, double nu2);
/// nu-quantile of the sample mixture, by bisection on its CDF.
double uqp(const PredictorSamples& samples, double nu, double tol = 1e-8);

/// Per-sample theta quantile: Beta quantile, or sigmoid(zeta) without dispersion.
double sample_quantile(const PredictorSamples& samples, std::size_t t, double nu);

double score(const PosteriorModel& model, const SparseVector& x, const ScoreSpec& spec, std::uint64_t seed);

using ScoredItem = std::pair<std::string, double>;

/// Scores every context (sample seed = spec.seed XOR ordinal) and sorts by
/// score descending, ties by id ascending.
std::vector<ScoredItem> score_batch(const PosteriorModel& model,
                                    const std::vector<std::pair<std::string, SparseVector>>& contexts,
                                    const ScoreSpec& spec);

/// TSV with a leading `#` comment recording the spec.
std::string format_scores(const std::vector<ScoredItem>& scores, const ScoreSpec& spec);
std::vector<ScoredItem> parse_scores(const std::string& text, const std::string& source);

} // namespace urank
