#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ncclab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lowercase hex SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

/// Provenance block embedded in every report. Contains nothing that varies
/// between identical runs.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> inputs;  // (name, sha256)
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json outcome = nlohmann::ordered_json::object();
};

nlohmann::ordered_json to_json(const RunManifest& m);

}  // namespace ncclab
