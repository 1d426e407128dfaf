#pragma once

#include "urank/sparse.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace urank {

struct InteractionRecord {
  std::string user_id;
  std::string item_id;
  std::int64_t impressions = 0; // n
  std::int64_t clicks = 0;      // v, never above impressions

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

/// Training or test pairs with their context vectors. Row r of `contexts`
/// belongs to records[r]; every row has dimension `dim`.
struct Dataset {
  Index dim = 0;
  std::vector<InteractionRecord> records;
  SparseDesign contexts;

  std::size_t size() const { return records.size(); }
  SparseVector context(std::size_t r) const { return contexts.row(r); }
  std::int64_t total_impressions() const;
};

Dataset make_dataset(Index dim, std::vector<InteractionRecord> records, std::span<const SparseVector> contexts);

/// Reads the interaction TSV (header `user_id item_id impressions clicks`).
/// Errors name the file, line and column.
std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path);
void write_interactions(const std::filesystem::path& path, std::span<const InteractionRecord> records);

/// JSON-lines of `{"<key>": str, "dim": int, "indices": [int], "values": [float]}`.
/// `key` is "item_id", "user_id" or "id" depending on the file.
std::vector<std::pair<std::string, SparseVector>> load_sparse_jsonl(const std::filesystem::path& path,
                                                                    const std::string& key);
void write_sparse_jsonl(const std::filesystem::path& path, const std::string& key,
                        std::span<const std::pair<std::string, SparseVector>> rows);

/// Cluster assignment TSV (header `user_id cluster`).
std::map<std::string, int> load_clusters(const std::filesystem::path& path);
void write_clusters(const std::filesystem::path& path, const std::map<std::string, int>& clusters);

/// Writes via a temporary sibling and renames on success, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

} // namespace urank
