#pragma once

#include "urank/dataset.hpp"
#include "urank/sparse.hpp"

#include <map>
#include <string>
#include <unordered_map>

namespace urank {

/// Multi-task block layout: block 0 is shared by every user, block 1+c belongs
/// to user cluster c.
struct FeatureConfig {
  Index d0 = 0;
  int clusters = 64;
  std::map<std::string, int> cluster_of;

  Index expanded_dim() const { return static_cast<Index>((clusters + 1) * static_cast<std::int64_t>(d0)); }
};

/// Places unit-norm item features in block 0 and block 1+cluster.
SparseVector assemble_context(const SparseVector& item_vec, int cluster, const FeatureConfig& config);

using ItemFeatures = std::unordered_map<std::string, SparseVector>;

ItemFeatures index_items(std::vector<std::pair<std::string, SparseVector>> items);

/// Context vectors for each record from its item features and its user's cluster.
Dataset build_dataset(std::vector<InteractionRecord> records, const ItemFeatures& items, const FeatureConfig& config);

/// Identifier used for a (user, item) pair in score files: "user_id:item_id".
std::string pair_id(const std::string& user_id, const std::string& item_id);

} // namespace urank
