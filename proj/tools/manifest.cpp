// Copyright 2026 The zoss-stability Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "manifest.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <array>
#include <fstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace zoss::cli {

std::string sha1_hex(std::string_view content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int size = 0;
  if (EVP_Digest(content.data(), content.size(), digest.data(), &size,
                 EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * size);
  for (unsigned int i = 0; i < size; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string git_blob_hash(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob += '\0';
  blob.append(content);
  return sha1_hex(blob);
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [name, hash] : m.outputs) outputs[name] = hash;
  return {
      {"command", m.command},
      {"subcommand", m.subcommand},
      {"config", m.config_text},
      {"config_hash", m.config_hash()},
      {"outputs", outputs},
      {"versions",
       {{"zoss", ZOSS_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"cli11", CLI11_VERSION},
        {"nlohmann_json",
         std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__}}},
      {"wall_time_seconds", m.wall_time_seconds},
      {"pass", m.pass},
      {"failures", m.failures},
  };
}

void write_outputs(const std::filesystem::path& dir,
                   const std::map<std::string, std::string>& files,
                   RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    manifest.outputs[name] = git_blob_hash(content);
  }
}

}  // namespace zoss::cli
