#pragma once

#include "urank/dataset.hpp"
#include "urank/posterior.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace urank {

struct TestSample {
  std::string user_id;
  std::string item_id;
  SparseVector context;
  bool label = false;  ///< clicked in the test period (v > 0)
  double reward = 1.0; ///< diversity gain over the user's training clicks
};

/// det(I + S_augmented) / det(I + S) computed as
/// 1 + x^T x - (X x)^T (I + X X^T)^{-1} (X x) with a Cholesky solve.
double diversity_gain(std::span<const SparseVector> history, const SparseVector& x);

/// Training contexts with v > 0, grouped by user.
std::map<std::string, std::vector<SparseVector>> click_histories(const Dataset& train);

/// One sample per test record, rewards from the user's training clicks.
std::vector<TestSample> make_test_samples(const Dataset& test, const Dataset& train);

enum class SaucWeighting {
  two_sided, ///< positives and negatives both weighted by reward
  one_sided, ///< only negatives (the horizontal axis) weighted
};

/// Reward-weighted ROC area. Tied scores form one diagonal segment.
/// InputError when either class has zero total weight.
double weighted_auc(std::span<const double> scores, const std::vector<bool>& labels, std::span<const double> rewards,
                    SaucWeighting weighting = SaucWeighting::two_sided);

/// `scores` is keyed by pair_id(user, item); a missing key is an InputError.
double sauc(const std::vector<TestSample>& samples, const std::map<std::string, double>& scores,
            SaucWeighting weighting = SaucWeighting::two_sided);
double auc(const std::vector<TestSample>& samples, const std::map<std::string, double>& scores);

/// sum [v ln p + (n - v) ln(1 - p)] / sum n with p = sigmoid(beta_hat^T x)
/// clamped to [1e-12, 1 - 1e-12].
double test_loglik_per_impression(const PosteriorModel& model, const Dataset& test);

} // namespace urank
