// awe/run_manifest.hpp

// Copyright 2026  AWE Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AWE_RUN_MANIFEST_HPP_
#define AWE_RUN_MANIFEST_HPP_

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "awe/errors.hpp"
#include "awe/version.hpp"

namespace awe {

// Reproducibility record written alongside every command output. Contains
// no timestamps so reruns with the same inputs are byte-identical.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["toolkit_version"] = kVersion;
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write run manifest: " + path);
    out << to_json().dump(2) << "\n";
  }
};

// Directory outputs get dir/run_manifest.json; file outputs get a sibling
// <file>.run.json.
inline std::string run_manifest_path(const std::string& output_path,
                                     bool is_dir) {
  if (is_dir)
    return (std::filesystem::path(output_path) / "run_manifest.json").string();
  return output_path + ".run.json";
}

}  // namespace awe

#endif  // AWE_RUN_MANIFEST_HPP_
