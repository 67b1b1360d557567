#include "ncclab/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "ncclab/errors.hpp"

namespace ncclab {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string out;
  out.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    out += buf;
  }
  return out;
}

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "ncclab";
  j["version"] = kToolVersion;
  j["subcommand"] = m.subcommand;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& [name, hash] : m.inputs) {
    nlohmann::ordered_json e;
    e["name"] = name;
    e["sha256"] = hash;
    inputs.push_back(e);
  }
  j["inputs"] = inputs;
  j["config"] = m.config;
  j["outcome"] = m.outcome;
  return j;
}

}  // namespace ncclab
