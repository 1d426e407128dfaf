#pragma once

#include "urank/clustering.hpp"
#include "urank/dataset.hpp"
#include "urank/features.hpp"
#include "urank/model.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace urank {

struct CountDistribution {
  enum class Kind { poisson, geometric, fixed };
  Kind kind = Kind::fixed;
  double mean = 0.0;
};

/// Ground-truth generator configuration. Every field is required in JSON.
struct SynthesisSpec {
  Index d0 = 0;
  int clusters = 0;
  int users = 0;
  int items = 0;
  int pairs_per_user = 0;
  int test_pairs_per_user = 0;
  CountDistribution impressions;
  CountDistribution test_impressions;
  int item_nnz = 0;       ///< nonzeros per item vector
  double beta_mean = 0.0; ///< entries of beta* ~ N(beta_mean, beta_sd^2)
  double beta_sd = 0.0;
  double rho_mean = 0.0;  ///< entries of rho* ~ N(rho_mean, rho_sd^2)
  double rho_sd = 0.0;
  int history_items = 0;  ///< items in each user's history indicator

  void validate() const;
};

SynthesisSpec parse_synthesis_spec(const std::string& json_text, const std::string& source);
SynthesisSpec load_synthesis_spec(const std::filesystem::path& path);

struct SyntheticData {
  FeatureConfig config;
  std::vector<std::pair<std::string, SparseVector>> items; ///< unit-norm, nonnegative
  std::vector<UserHistory> histories;
  Dataset train;
  Dataset test;
  CoefficientPair truth;
};

/// Draws beta*, rho*, item vectors, cluster labels and histories (each
/// cluster prefers its own slice of the catalogue), then
/// theta ~ Be(exp((beta*+rho*)^T x), exp(rho*^T x)) and v ~ Binomial(n, theta).
SyntheticData synthesize_dataset(const SynthesisSpec& spec, std::uint64_t seed);

/// Beta draw through log-gamma variates; stable for tiny shape parameters.
double sample_beta(std::mt19937_64& rng, double a1, double a2);

} // namespace urank
