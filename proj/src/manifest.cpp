#include "mics/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "mics/error.hpp"

namespace mics {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw InvariantViolation("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string manifest_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("SOURCE_DATE_EPOCH must be a non-negative integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json manifest_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& in : m.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
  return Json{{"tool", m.tool},
              {"version", m.version},
              {"command", m.command},
              {"config", m.config},
              {"seeds", {{"seed", m.seed}, {"sub_seed_rule", "splitmix64(seed ^ splitmix64(stream))"}}},
              {"inputs", inputs},
              {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const Json& j) {
  const Json& mj = j.is_object() && j.contains("manifest") ? j.at("manifest") : j;
  try {
    RunManifest m;
    m.tool = mj.at("tool").get<std::string>();
    if (m.tool != kToolName) throw ParseError(0, "manifest was written by '" + m.tool + "'");
    m.version = mj.at("version").get<std::string>();
    m.command = mj.at("command").get<std::string>();
    m.config = mj.at("config");
    m.seed = mj.at("seeds").at("seed").get<std::uint64_t>();
    for (const auto& in : mj.at("inputs")) {
      m.inputs.push_back({in.at("path").get<std::string>(), in.at("sha256").get<std::string>()});
    }
    m.timestamp = mj.at("timestamp").get<std::string>();
    return m;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("malformed manifest: ") + e.what());
  }
}

void verify_inputs(const RunManifest& manifest) {
  for (const auto& in : manifest.inputs) {
    const std::string now = sha256_file(in.path);
    if (now != in.sha256) {
      throw IoError("input '" + in.path + "' changed since the manifest was written");
    }
  }
}

}  // namespace mics
