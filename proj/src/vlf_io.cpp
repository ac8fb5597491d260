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
#include "vld/vlf_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace vld {
namespace {

constexpr char kMagic[] = "VLF1";

void write_le_doubles(std::ostream& os, const Eigen::ArrayXd& a) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(a.data()), std::streamsize(sizeof(double) * size_t(a.size())));
  } else {
    for (Index i = 0; i < a.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &a[i], sizeof bits);
      bits = __builtin_bswap64(bits);
      os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
}

Eigen::ArrayXd read_le_doubles(std::istream& is, Index n) {
  Eigen::ArrayXd a(n);
  is.read(reinterpret_cast<char*>(a.data()), std::streamsize(sizeof(double) * size_t(n)));
  if (is.gcount() != std::streamsize(sizeof(double) * size_t(n))) throw ConfigError("VLF1: truncated payload");
  if constexpr (std::endian::native != std::endian::little) {
    for (Index i = 0; i < n; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, &a[i], sizeof bits);
      bits = __builtin_bswap64(bits);
      std::memcpy(&a[i], &bits, sizeof bits);
    }
  }
  return a;
}

void write_header(std::ostream& os, const Grid3& g, int ncomp, const std::string& name) {
  nlohmann::ordered_json h;
  h["nx"] = g.nx;
  h["ny"] = g.ny;
  h["nz"] = g.nz;
  h["lx"] = g.lx;
  h["ly"] = g.ly;
  h["lz"] = g.lz;
  h["ncomp"] = ncomp;
  h["name"] = name;
  os << kMagic << '\n' << h.dump() << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

const Grid3& VlfFile::grid() const {
  return std::visit([](const auto& f) -> const Grid3& { return f.grid; }, field);
}

void write_vlf(const std::filesystem::path& path, const VectorField3& v, const std::string& name) {
  auto os = open_out(path);
  write_header(os, v.grid, 3, name);
  for (const auto& c : v.comp) write_le_doubles(os, c);
  if (!os) throw ConfigError("write failed: " + path.string());
}

void write_vlf(const std::filesystem::path& path, const ScalarField3& s, const std::string& name) {
  auto os = open_out(path);
  write_header(os, s.grid, 1, name);
  write_le_doubles(os, s.data);
  if (!os) throw ConfigError("write failed: " + path.string());
}

VlfFile read_vlf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  std::string magic, header;
  if (!std::getline(is, magic) || magic != kMagic) throw ConfigError(path.string() + ": not a VLF1 file");
  if (!std::getline(is, header)) throw ConfigError(path.string() + ": missing VLF1 header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": bad VLF1 header: " + e.what());
  }
  Grid3 g;
  int ncomp = 0;
  VlfFile out;
  try {
    g = Grid3{h.at("nx").get<int>(), h.at("ny").get<int>(), h.at("nz").get<int>(),
              h.at("lx").get<double>(), h.at("ly").get<double>(), h.at("lz").get<double>()};
    ncomp = h.at("ncomp").get<int>();
    out.name = h.value("name", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": incomplete VLF1 header: " + e.what());
  }
  g.validate();
  if (ncomp == 1) {
    out.field = ScalarField3(g, read_le_doubles(is, g.size()));
  } else if (ncomp == 3) {
    std::array<Eigen::ArrayXd, 3> c;
    for (auto& a : c) a = read_le_doubles(is, g.size());
    out.field = VectorField3(g, std::move(c));
  } else {
    throw ConfigError(path.string() + ": ncomp must be 1 or 3");
  }
  return out;
}

VectorField3 read_vlf_vector(const std::filesystem::path& path, std::string* name) {
  VlfFile f = read_vlf(path);
  if (f.ncomp() != 3) throw ConfigError(path.string() + ": expected a 3-component field");
  if (name) *name = f.name;
  return std::get<VectorField3>(std::move(f.field));
}

}  // namespace vld
