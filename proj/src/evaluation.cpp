#include "urank/evaluation.hpp"

#include "urank/errors.hpp"
#include "urank/features.hpp"
#include "urank/model.hpp"
#include "urank/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace urank {

double diversity_gain(std::span<const SparseVector> history, const SparseVector& x) {
  for (const auto& h : history) {
    if (h.dim() != x.dim()) throw InputError("history vector dimension does not match the test context");
  }
  const double base = 1.0 + x.squared_norm();
  const auto n = static_cast<Eigen::Index>(history.size());
  if (n == 0) return base;
  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b[i] = history[i].dot(x);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double s = history[i].dot(history[j]) + (i == j ? 1.0 : 0.0);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw NumericError("Cholesky failed in diversity_gain");
  return base - b.dot(llt.solve(b));
}

std::map<std::string, std::vector<SparseVector>> click_histories(const Dataset& train) {
  std::map<std::string, std::vector<SparseVector>> out;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (train.records[r].clicks > 0) out[train.records[r].user_id].push_back(train.context(r));
  }
  return out;
}

std::vector<TestSample> make_test_samples(const Dataset& test, const Dataset& train) {
  const auto histories = click_histories(train);
  const std::vector<SparseVector> empty;
  std::vector<TestSample> out(test.size());
  parallel::for_each_index(static_cast<std::int64_t>(test.size()), [&](std::int64_t i) {
    const auto r = static_cast<std::size_t>(i);
    const auto& rec = test.records[r];
    TestSample& s = out[r];
    s.user_id = rec.user_id;
    s.item_id = rec.item_id;
    s.context = test.context(r);
    s.label = rec.clicks > 0;
    const auto h = histories.find(rec.user_id);
    s.reward = diversity_gain(h == histories.end() ? empty : h->second, s.context);
  });
  return out;
}

double weighted_auc(std::span<const double> scores, const std::vector<bool>& labels, std::span<const double> rewards,
                    SaucWeighting weighting) {
  const std::size_t n = scores.size();
  if (labels.size() != n || rewards.size() != n) throw InputError("scores, labels and rewards differ in length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Weighted pair masses; normalizing by their sum instead of P * N keeps the
  // perfect, reversed and all-tied cases exact.
  double pos_total = 0.0;
  double neg_total = 0.0;
  double wins = 0.0;
  double ties = 0.0;
  double losses = 0.0;
  for (std::size_t i = 0; i < n;) {
    double pos = 0.0;
    double neg = 0.0;
    std::size_t j = i;
    for (; j < n && scores[order[j]] == scores[order[i]]; ++j) {
      const std::size_t k = order[j];
      if (labels[k]) {
        pos += weighting == SaucWeighting::two_sided ? rewards[k] : 1.0;
      } else {
        neg += rewards[k];
      }
    }
    wins += neg * pos_total;
    ties += neg * pos;
    losses += pos * neg_total;
    pos_total += pos;
    neg_total += neg;
    i = j;
  }
  if (!(pos_total > 0.0)) throw InputError("AUC undefined: no positive samples");
  if (!(neg_total > 0.0)) throw InputError("AUC undefined: no negative samples");
  return (wins + 0.5 * ties) / (wins + ties + losses);
}

namespace {

double weighted_from_samples(const std::vector<TestSample>& samples, const std::map<std::string, double>& scores,
                             bool use_rewards, SaucWeighting weighting) {
  std::vector<double> s(samples.size());
  std::vector<bool> labels(samples.size());
  std::vector<double> r(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string id = pair_id(samples[i].user_id, samples[i].item_id);
    const auto it = scores.find(id);
    if (it == scores.end()) throw InputError("no score for test pair " + id);
    s[i] = it->second;
    labels[i] = samples[i].label;
    r[i] = use_rewards ? samples[i].reward : 1.0;
  }
  return weighted_auc(s, labels, r, weighting);
}

} // namespace

double sauc(const std::vector<TestSample>& samples, const std::map<std::string, double>& scores,
            SaucWeighting weighting) {
  return weighted_from_samples(samples, scores, true, weighting);
}

double auc(const std::vector<TestSample>& samples, const std::map<std::string, double>& scores) {
  return weighted_from_samples(samples, scores, false, SaucWeighting::two_sided);
}

double test_loglik_per_impression(const PosteriorModel& model, const Dataset& test) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto& rec = test.records[r];
    if (rec.impressions == 0) continue;
    const double p = std::clamp(sigmoid(model.zeta_mean(test.context(r))), 1e-12, 1.0 - 1e-12);
    const auto v = static_cast<double>(rec.clicks);
    const auto n = static_cast<double>(rec.impressions);
    num += v * std::log(p) + (n - v) * std::log1p(-p);
    den += n;
  }
  if (!(den > 0.0)) throw InputError("test set has no impressions");
  return num / den;
}

} // namespace urank
