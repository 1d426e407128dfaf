#pragma once

#include "urank/sparse.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace urank {

/// Binary indicator of the items a user chose earlier, scaled to unit L2 norm.
struct UserHistory {
  std::string user_id;
  SparseVector item_indicator;
};

/// Builds the normalized indicator from raw item positions (duplicates ignored).
UserHistory make_user_history(std::string user_id, Index n_items, std::vector<Index> items);

struct KMeansResult {
  std::map<std::string, int> labels;
  std::vector<Eigen::VectorXd> centroids;
  /// Sum of cosine similarities to the assigned centroid after each assignment pass.
  std::vector<double> objective_trace;
  int iterations = 0;
};

/// Spherical k-means on unit-norm histories. Centroids start at K distinct
/// histories drawn with `seed`; stops after `max_iter` passes or when no label
/// changes. Empty clusters are reseeded from the history with the lowest
/// cosine to its own centroid. `restarts` runs draw successive initializations
/// from the same generator and the run with the highest final objective wins.
KMeansResult spherical_kmeans(const std::vector<UserHistory>& histories, int k, std::uint64_t seed, int max_iter = 100,
                              int restarts = 8);

} // namespace urank
