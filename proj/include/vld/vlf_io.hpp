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
#include <string>
#include <variant>

#include "vld/grid.hpp"

namespace vld {

/// Contents of a VLF1 file: "VLF1\n", one JSON header line, then
/// ncomp * nx*ny*nz little-endian float64 values (component-major,
/// x-fastest within a component).
struct VlfFile {
  std::string name;  // "u" or "omega" for vector files
  std::variant<ScalarField3, VectorField3> field;

  int ncomp() const { return std::holds_alternative<ScalarField3>(field) ? 1 : 3; }
  const Grid3& grid() const;
};

void write_vlf(const std::filesystem::path& path, const VectorField3& v, const std::string& name);
void write_vlf(const std::filesystem::path& path, const ScalarField3& s, const std::string& name);
VlfFile read_vlf(const std::filesystem::path& path);
/// Reads a 3-component file; throws ConfigError for scalar files.
VectorField3 read_vlf_vector(const std::filesystem::path& path, std::string* name = nullptr);

}  // namespace vld
