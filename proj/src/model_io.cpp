#include "urank/model_io.hpp"

#include "urank/dataset.hpp"
#include "urank/errors.hpp"

#include <boost/crc.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstring>

namespace urank {
namespace {

using nlohmann::json;

class PayloadCrc {
public:
  void add(double v) { bytes(&v, sizeof v); }
  void add(std::uint64_t v) { bytes(&v, sizeof v); }
  void add(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) add(v[i]);
  }
  void add_row_major(const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) add(m(i, j));
    }
  }
  std::uint32_t value() const { return crc_.checksum(); }

private:
  void bytes(const void* p, std::size_t n) { crc_.process_bytes(p, n); }
  boost::crc_32_type crc_;
};

std::uint32_t payload_crc(const PosteriorModel& m) {
  PayloadCrc crc;
  crc.add(static_cast<std::uint64_t>(m.dim));
  crc.add(static_cast<std::uint64_t>(m.rank));
  for (const LowRankGaussianBlock* b : {&m.beta_block, &m.rho_block}) {
    crc.add(static_cast<std::uint64_t>(b->mean.size()));
    crc.add(static_cast<std::uint64_t>(b->lambda.size()));
    crc.add(b->c);
    crc.add(b->mean);
    crc.add(b->lambda);
    crc.add_row_major(b->V);
  }
  return crc.value();
}

json block_json(const LowRankGaussianBlock& b) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(b.V.size()));
  for (Eigen::Index i = 0; i < b.V.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.V.cols(); ++j) v.push_back(b.V(i, j));
  }
  return json{{"d", b.mean.size()},
              {"k", b.lambda.size()},
              {"c", b.c},
              {"mean", std::vector<double>(b.mean.data(), b.mean.data() + b.mean.size())},
              {"lambda", std::vector<double>(b.lambda.data(), b.lambda.data() + b.lambda.size())},
              {"V", v}};
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

LowRankGaussianBlock block_from(const json& j) {
  LowRankGaussianBlock b;
  const auto d = j.at("d").get<std::int64_t>();
  const auto k = j.at("k").get<std::int64_t>();
  b.c = j.at("c").get<double>();
  b.mean = vector_from(j.at("mean"));
  b.lambda = vector_from(j.at("lambda"));
  const auto v = j.at("V").get<std::vector<double>>();
  if (d < 0 || k < 0 || b.mean.size() != d || b.lambda.size() != k || static_cast<std::int64_t>(v.size()) != d * k) {
    throw ChecksumError("model block has inconsistent sizes");
  }
  b.V.resize(d, k);
  for (std::int64_t i = 0; i < d; ++i) {
    for (std::int64_t l = 0; l < k; ++l) b.V(i, l) = v[static_cast<std::size_t>(i * k + l)];
  }
  return b;
}

} // namespace

std::string serialize_model(const PosteriorModel& model) {
  json j;
  j["version"] = kModelVersion;
  j["kind"] = to_string(model.kind);
  j["d"] = model.dim;
  j["k"] = model.rank;
  j["beta"] = block_json(model.beta_block);
  j["rho"] = block_json(model.rho_block);
  j["crc32"] = payload_crc(model);
  return j.dump() + "\n";
}

PosteriorModel deserialize_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ChecksumError(std::string("model file is truncated or corrupt: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version")) throw ChecksumError("model file has no version field");
  const std::string version = j.at("version").is_string() ? j.at("version").get<std::string>() : "<non-string>";
  if (version != kModelVersion) {
    throw VersionError("model version '" + version + "' does not match supported version '" + kModelVersion + "'");
  }
  PosteriorModel m;
  std::uint32_t stored = 0;
  try {
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.dim = j.at("d").get<Index>();
    m.rank = j.at("k").get<int>();
    m.beta_block = block_from(j.at("beta"));
    m.rho_block = block_from(j.at("rho"));
    stored = j.at("crc32").get<std::uint32_t>();
  } catch (const json::exception& e) {
    throw ChecksumError(std::string("model file is missing fields: ") + e.what());
  }
  if (payload_crc(m) != stored) throw ChecksumError("model payload does not match its CRC-32");
  return m;
}

void save_model(const PosteriorModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

PosteriorModel load_model(const std::filesystem::path& path) {
  try {
    return deserialize_model(read_file(path));
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const ChecksumError& e) {
    throw ChecksumError(path.string() + ": " + e.what());
  }
}

} // namespace urank
