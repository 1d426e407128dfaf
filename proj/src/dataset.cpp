#include "urank/dataset.hpp"

#include "urank/errors.hpp"

#include <json.hpp>

#include <unistd.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

namespace urank {
namespace {

using json = nlohmann::json;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::int64_t parse_count(std::string_view field, const std::filesystem::path& path, std::size_t line,
                         std::size_t column, const char* name) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw InputError(where(path, line, column) + ": cannot parse " + name + " from '" + std::string(field) + "'");
  }
  if (value < 0) throw InputError(where(path, line, column) + ": " + name + " must be nonnegative");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

} // namespace

std::int64_t Dataset::total_impressions() const {
  std::int64_t total = 0;
  for (const auto& r : records) total += r.impressions;
  return total;
}

Dataset make_dataset(Index dim, std::vector<InteractionRecord> records, std::span<const SparseVector> contexts) {
  if (records.size() != contexts.size()) throw InputError("dataset: one context per record required");
  Dataset ds;
  ds.dim = dim;
  ds.records = std::move(records);
  ds.contexts = SparseDesign(dim, contexts);
  return ds;
}

std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string raw;
  if (!std::getline(in, raw)) throw InputError(where(path, 1, 1) + ": missing header");
  const auto header = split_tabs(chomp(raw));
  const std::vector<std::string_view> expected{"user_id", "item_id", "impressions", "clicks"};
  if (header != expected) {
    throw InputError(where(path, 1, 1) + ": expected header 'user_id\\titem_id\\timpressions\\tclicks'");
  }
  std::vector<InteractionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw InputError(where(path, line_no, std::min<std::size_t>(fields.size() + 1, 5)) + ": expected 4 columns, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw InputError(where(path, line_no, 1) + ": empty user_id");
    if (fields[1].empty()) throw InputError(where(path, line_no, 2) + ": empty item_id");
    InteractionRecord rec{std::string(fields[0]), std::string(fields[1]),
                          parse_count(fields[2], path, line_no, 3, "impressions"),
                          parse_count(fields[3], path, line_no, 4, "clicks")};
    if (rec.clicks > rec.impressions) {
      throw InputError(where(path, line_no, 4) + ": record (" + rec.user_id + ", " + rec.item_id + ") has clicks " +
                       std::to_string(rec.clicks) + " > impressions " + std::to_string(rec.impressions));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_interactions(const std::filesystem::path& path, std::span<const InteractionRecord> records) {
  std::ostringstream os;
  os << "user_id\titem_id\timpressions\tclicks\n";
  for (const auto& r : records) os << r.user_id << '\t' << r.item_id << '\t' << r.impressions << '\t' << r.clicks << '\n';
  write_file_atomic(path, os.str());
}

std::vector<std::pair<std::string, SparseVector>> load_sparse_jsonl(const std::filesystem::path& path,
                                                                    const std::string& key) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::string, SparseVector>> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (chomp(raw).empty()) continue;
    try {
      const json j = json::parse(raw);
      const auto dim = j.at("dim").get<std::int64_t>();
      if (dim <= 0 || dim > std::numeric_limits<Index>::max()) throw InputError("dim must be positive");
      auto indices = j.at("indices").get<std::vector<std::int64_t>>();
      auto values = j.at("values").get<std::vector<double>>();
      if (indices.size() != values.size()) throw InputError("indices and values differ in length");
      std::vector<std::pair<Index, double>> entries;
      entries.reserve(indices.size());
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= dim) throw InputError("index " + std::to_string(indices[i]) + " out of range");
        entries.emplace_back(static_cast<Index>(indices[i]), values[i]);
      }
      out.emplace_back(j.at(key).get<std::string>(), SparseVector::from_pairs(static_cast<Index>(dim), std::move(entries)));
    } catch (const json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_sparse_jsonl(const std::filesystem::path& path, const std::string& key,
                        std::span<const std::pair<std::string, SparseVector>> rows) {
  std::string out;
  for (const auto& [id, vec] : rows) {
    json j;
    j[key] = id;
    j["dim"] = vec.dim();
    j["indices"] = std::vector<Index>(vec.indices().begin(), vec.indices().end());
    j["values"] = std::vector<double>(vec.values().begin(), vec.values().end());
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::map<std::string, int> load_clusters(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string raw;
  if (!std::getline(in, raw) || split_tabs(chomp(raw)) != std::vector<std::string_view>{"user_id", "cluster"}) {
    throw InputError(where(path, 1, 1) + ": expected header 'user_id\\tcluster'");
  }
  std::map<std::string, int> out;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw InputError(where(path, line_no, 1) + ": expected 2 columns");
    const auto label = parse_count(fields[1], path, line_no, 2, "cluster");
    if (!out.emplace(std::string(fields[0]), static_cast<int>(label)).second) {
      throw InputError(where(path, line_no, 1) + ": duplicate user " + std::string(fields[0]));
    }
  }
  return out;
}

void write_clusters(const std::filesystem::path& path, const std::map<std::string, int>& clusters) {
  std::ostringstream os;
  os << "user_id\tcluster\n";
  for (const auto& [user, label] : clusters) os << user << '\t' << label << '\n';
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace urank
