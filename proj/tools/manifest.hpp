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


#ifndef ZOSS_TOOLS_MANIFEST_HPP_
#define ZOSS_TOOLS_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace zoss::cli {

// Hex SHA-1 of "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_hash(std::string_view content);
std::string sha1_hex(std::string_view content);

struct RunManifest {
  std::vector<std::string> command;
  std::string subcommand;
  std::string config_text;  // resolved key = value lines
  std::map<std::string, std::string> outputs;  // file name -> blob hash
  std::vector<std::string> failures;
  bool pass = true;
  double wall_time_seconds = 0.0;

  std::string config_hash() const { return sha1_hex(config_text); }
};

nlohmann::json to_json(const RunManifest& manifest);

// Writes each file under dir and records its hash in the manifest.
void write_outputs(const std::filesystem::path& dir,
                   const std::map<std::string, std::string>& files,
                   RunManifest& manifest);

}  // namespace zoss::cli

#endif  // ZOSS_TOOLS_MANIFEST_HPP_
