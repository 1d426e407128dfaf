#include "urank/features.hpp"

#include "urank/errors.hpp"

#include <cmath>

namespace urank {

SparseVector assemble_context(const SparseVector& item_vec, int cluster, const FeatureConfig& config) {
  if (cluster < 0 || cluster >= config.clusters) {
    throw InputError("cluster " + std::to_string(cluster) + " out of range [0," + std::to_string(config.clusters) + ")");
  }
  if (item_vec.dim() != config.d0) {
    throw InputError("item vector has dimension " + std::to_string(item_vec.dim()) + ", expected " +
                     std::to_string(config.d0));
  }
  if (std::fabs(item_vec.squared_norm() - 1.0) > 1e-9) throw InputError("item vector is not unit-norm");

  const std::size_t nnz = item_vec.nnz();
  std::vector<Index> idx(2 * nnz);
  std::vector<double> val(2 * nnz);
  const Index offset = static_cast<Index>(1 + cluster) * config.d0;
  for (std::size_t i = 0; i < nnz; ++i) {
    idx[i] = item_vec.indices()[i];
    val[i] = item_vec.values()[i];
    idx[nnz + i] = offset + item_vec.indices()[i];
    val[nnz + i] = item_vec.values()[i];
  }
  return SparseVector(config.expanded_dim(), std::move(idx), std::move(val));
}

ItemFeatures index_items(std::vector<std::pair<std::string, SparseVector>> items) {
  ItemFeatures out;
  for (auto& [id, vec] : items) {
    if (!out.emplace(id, std::move(vec)).second) throw InputError("duplicate item_id " + id);
  }
  return out;
}

Dataset build_dataset(std::vector<InteractionRecord> records, const ItemFeatures& items, const FeatureConfig& config) {
  std::vector<SparseVector> contexts;
  contexts.reserve(records.size());
  for (const auto& r : records) {
    const auto item = items.find(r.item_id);
    if (item == items.end()) throw InputError("no features for item " + r.item_id);
    const auto cluster = config.cluster_of.find(r.user_id);
    if (cluster == config.cluster_of.end()) throw InputError("no cluster label for user " + r.user_id);
    contexts.push_back(assemble_context(item->second, cluster->second, config));
  }
  return make_dataset(config.expanded_dim(), std::move(records), contexts);
}

std::string pair_id(const std::string& user_id, const std::string& item_id) {
  if (user_id.find(':') != std::string::npos || item_id.find(':') != std::string::npos) {
    throw InputError("identifiers must not contain ':' (" + user_id + ", " + item_id + ")");
  }
  return user_id + ":" + item_id;
}

} // namespace urank
