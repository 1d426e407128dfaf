#pragma once

#include "urank/posterior.hpp"

#include <filesystem>
#include <string>

namespace urank {

inline constexpr const char* kModelVersion = "uncertain-rank/1";

/// JSON document with the version tag, kind, dimensions, both blocks and a
/// CRC-32 of the numeric payload. Doubles are written in shortest
/// round-trip form, so load(save(m)) reproduces every bit.
std::string serialize_model(const PosteriorModel& model);
PosteriorModel deserialize_model(const std::string& text);

void save_model(const PosteriorModel& model, const std::filesystem::path& path);
/// VersionError on a foreign version tag, ChecksumError on truncation or a
/// payload that does not match its CRC.
PosteriorModel load_model(const std::filesystem::path& path);

} // namespace urank
