#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mics/json_io.hpp"

namespace mics {

inline constexpr std::string_view kToolName = "mics";
inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// Everything needed to rerun a command and get the same bytes back.
struct RunManifest {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<InputDigest> inputs;
  std::string timestamp;
};

/// UTC ISO-8601. Taken from SOURCE_DATE_EPOCH when set, else the clock.
std::string manifest_timestamp();

Json manifest_json(const RunManifest& manifest);
/// Accepts a bare manifest or any output document with a `manifest` member.
RunManifest manifest_from_json(const Json& j);

/// Throws IoError if a recorded input no longer matches its digest.
void verify_inputs(const RunManifest& manifest);

}  // namespace mics
