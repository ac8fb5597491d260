// Copyright 2026 The vld Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "vld/criteria.hpp"
#include "vld/euler.hpp"

namespace vld {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kFormatVersion = "VLF1";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;  // relative to the run directory for outputs
  std::string sha256;
};

struct SnapshotEntry {
  double t = 0.0;
  std::string path;
};

/// Everything needed to re-execute a run and to check its files.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::ordered_json config;
  std::string tool_version = kToolVersion;
  std::string format_version = kFormatVersion;
  std::string started;
  std::string finished;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::vector<SnapshotEntry> snapshots;
};

inline constexpr const char* kManifestName = "manifest.json";

void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
/// Throws ConfigError when the manifest is missing or malformed.
RunManifest read_manifest(const std::filesystem::path& dir);

/// UTC wall-clock time, ISO 8601.
std::string utc_timestamp();

inline constexpr const char* kLineSeriesHeader = "t,div_integral,abs_div_integral,omega_x,omega_y,ratio,tau";

void write_line_series_csv(std::ostream& os, const std::vector<Theorem1Sample>& series);
std::vector<Theorem1Sample> read_line_series_csv(std::istream& is);

inline constexpr const char* kMaterialHeader = "t,l,M,U_xi,U_n,Omega_l";

void write_material_csv(std::ostream& os, const std::vector<MaterialLineStats>& stats);

/// JSON forms shared by the subcommands. Key order is fixed.
nlohmann::ordered_json to_json(const CriterionVerdict& v);
nlohmann::ordered_json to_json(const ScalingScenario& s);
nlohmann::ordered_json to_json(const Vec3& v);

}  // namespace vld
