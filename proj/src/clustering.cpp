#include "urank/clustering.hpp"

#include "urank/errors.hpp"
#include "urank/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace urank {
namespace {

struct Assignment {
  std::vector<int> label;
  std::vector<double> cosine;
};

Assignment assign(const std::vector<UserHistory>& histories, const std::vector<Eigen::VectorXd>& centroids) {
  const auto n = static_cast<std::int64_t>(histories.size());
  Assignment a{std::vector<int>(histories.size()), std::vector<double>(histories.size())};
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < n; ++u) {
    const auto& h = histories[static_cast<std::size_t>(u)].item_indicator;
    int best = 0;
    double best_cos = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double cos = h.dot(centroids[c]);
      if (cos > best_cos) {
        best_cos = cos;
        best = static_cast<int>(c);
      }
    }
    a.label[static_cast<std::size_t>(u)] = best;
    a.cosine[static_cast<std::size_t>(u)] = best_cos;
  }
  return a;
}

Eigen::VectorXd normalized_dense(const SparseVector& v) {
  Eigen::VectorXd d = v.to_dense();
  const double norm = d.norm();
  if (norm > 0.0) d /= norm;
  return d;
}

} // namespace

UserHistory make_user_history(std::string user_id, Index n_items, std::vector<Index> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  if (items.empty()) throw InputError("user history for " + user_id + " is empty");
  const double value = 1.0 / std::sqrt(static_cast<double>(items.size()));
  std::vector<double> values(items.size(), value);
  return {std::move(user_id), SparseVector(n_items, std::move(items), std::move(values))};
}

namespace {

struct Run {
  KMeansResult result;
  std::vector<int> labels;
};

Run run_once(const std::vector<UserHistory>& histories, int k, std::mt19937_64& rng, int max_iter, Index dim) {
  std::vector<std::size_t> order(histories.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Eigen::VectorXd> centroids;
  for (int c = 0; c < k; ++c) centroids.push_back(normalized_dense(histories[order[static_cast<std::size_t>(c)]].item_indicator));

  KMeansResult result;
  std::vector<int> previous;
  for (int iter = 0; iter < max_iter; ++iter) {
    Assignment a = assign(histories, centroids);
    result.objective_trace.push_back(kernels::sum(a.cosine));
    result.iterations = iter + 1;
    const bool changed = a.label != previous;
    previous = a.label;
    if (!changed) break;

    // Centroid update: each cluster sums its members in user order.
    std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(k), Eigen::VectorXd::Zero(dim));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t u = 0; u < histories.size(); ++u) {
      const auto& h = histories[u].item_indicator;
      auto& s = sums[static_cast<std::size_t>(a.label[u])];
      for (std::size_t i = 0; i < h.nnz(); ++i) s[h.indices()[i]] += h.values()[i];
      ++counts[static_cast<std::size_t>(a.label[u])];
    }
    std::vector<bool> reseeded(histories.size(), false);
    for (int c = 0; c < k; ++c) {
      auto& s = sums[static_cast<std::size_t>(c)];
      const double norm = s.norm();
      if (counts[static_cast<std::size_t>(c)] > 0 && norm > 0.0) {
        centroids[static_cast<std::size_t>(c)] = s / norm;
        continue;
      }
      std::size_t far = 0;
      double far_cos = std::numeric_limits<double>::infinity();
      for (std::size_t u = 0; u < histories.size(); ++u) {
        if (!reseeded[u] && a.cosine[u] < far_cos) {
          far_cos = a.cosine[u];
          far = u;
        }
      }
      reseeded[far] = true;
      centroids[static_cast<std::size_t>(c)] = normalized_dense(histories[far].item_indicator);
    }
  }

  Run run;
  run.labels = std::move(previous);
  result.centroids = std::move(centroids);
  run.result = std::move(result);
  return run;
}

} // namespace

KMeansResult spherical_kmeans(const std::vector<UserHistory>& histories, int k, std::uint64_t seed, int max_iter,
                              int restarts) {
  if (histories.empty()) throw InputError("spherical_kmeans: no user histories");
  if (k < 1) throw InputError("spherical_kmeans: K must be at least 1");
  if (static_cast<std::size_t>(k) > histories.size()) {
    throw InputError("spherical_kmeans: K=" + std::to_string(k) + " exceeds the number of users (" +
                     std::to_string(histories.size()) + ")");
  }
  if (max_iter < 1) throw InputError("spherical_kmeans: max_iter must be positive");
  if (restarts < 1) throw InputError("spherical_kmeans: restarts must be positive");
  const Index dim = histories.front().item_indicator.dim();
  for (const auto& h : histories) {
    if (h.item_indicator.dim() != dim) throw InputError("spherical_kmeans: history dimensions differ");
    if (std::fabs(h.item_indicator.squared_norm() - 1.0) > 1e-9) {
      throw InputError("spherical_kmeans: history of " + h.user_id + " is not unit-norm");
    }
  }

  std::mt19937_64 rng(seed);
  Run best;
  for (int r = 0; r < restarts; ++r) {
    Run run = run_once(histories, k, rng, max_iter, dim);
    if (r == 0 || run.result.objective_trace.back() > best.result.objective_trace.back()) best = std::move(run);
  }
  for (std::size_t u = 0; u < histories.size(); ++u) best.result.labels[histories[u].user_id] = best.labels[u];
  return best.result;
}

} // namespace urank
