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
#include "vld/run_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "vld/error.hpp"
#include "vld/format.hpp"

namespace vld {
namespace {

std::vector<double> parse_row(const std::string& line, std::size_t width, const char* what) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": bad number '" + cell + "'");
    }
  }
  if (v.size() != width) throw ConfigError(std::string(what) + ": expected " + std::to_string(width) + " columns");
  return v;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("sha256: digest initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["tool_version"] = m.tool_version;
  j["format_version"] = m.format_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  auto digests = [](const std::vector<FileDigest>& fs) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& f : fs) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return a;
  };
  j["inputs"] = digests(m.inputs);
  j["outputs"] = digests(m.outputs);
  nlohmann::ordered_json snaps = nlohmann::ordered_json::array();
  for (const auto& s : m.snapshots) snaps.push_back({{"t", s.t}, {"path", s.path}});
  j["snapshots"] = snaps;
  std::ofstream os(dir / kManifestName);
  if (!os) throw ConfigError("cannot write " + (dir / kManifestName).string());
  os << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  std::ifstream is(path);
  if (!is) throw ConfigError("missing manifest: " + path.string());
  RunManifest m;
  try {
    const auto j = nlohmann::ordered_json::parse(is);
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.format_version = j.at("format_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
    for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
    for (const auto& s : j.at("snapshots")) m.snapshots.push_back({s.at("t").get<double>(), s.at("path")});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest " + path.string() + ": " + e.what());
  }
  if (m.format_version != kFormatVersion) throw ConfigError("manifest format version must be " + std::string(kFormatVersion));
  return m;
}

void write_line_series_csv(std::ostream& os, const std::vector<Theorem1Sample>& series) {
  os << kLineSeriesHeader << "\n";
  for (const auto& s : series) {
    os << fmt17(s.t) << ',' << fmt17(s.div_integral) << ',' << fmt17(s.abs_div_integral) << ',' << fmt17(s.omega_x)
       << ',' << fmt17(s.omega_y) << ',' << fmt17(s.endpoint_ratio) << ',' << fmt17(s.tau) << "\n";
  }
}

std::vector<Theorem1Sample> read_line_series_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kLineSeriesHeader) throw ConfigError("line series: unexpected header");
  std::vector<Theorem1Sample> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto v = parse_row(line, 7, "line series");
    Theorem1Sample s;
    s.t = v[0];
    s.div_integral = v[1];
    s.abs_div_integral = v[2];
    s.omega_x = v[3];
    s.omega_y = v[4];
    s.endpoint_ratio = v[5];
    s.tau = v[6];
    out.push_back(s);
  }
  return out;
}

void write_material_csv(std::ostream& os, const std::vector<MaterialLineStats>& stats) {
  os << kMaterialHeader << "\n";
  for (const auto& s : stats) {
    os << fmt17(s.t) << ',' << fmt17(s.l) << ',' << fmt17(s.M) << ',' << fmt17(s.U_xi) << ',' << fmt17(s.U_n) << ','
       << fmt17(s.Omega_l) << "\n";
  }
}

nlohmann::ordered_json to_json(const CriterionVerdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(v.verdict);
  j["failed_conditions"] = v.failed_conditions;
  nlohmann::ordered_json margins = nlohmann::ordered_json::object();
  for (const auto& [k, m] : v.margins) margins[k] = m;
  j["margins"] = margins;
  j["notes"] = v.notes;
  return j;
}

nlohmann::ordered_json to_json(const ScalingScenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["kind"] = s.kind == ScenarioKind::theorem1 ? "theorem1" : "theorem2";
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["gamma"] = s.gamma;
  j["C0"] = s.C0;
  j["c0"] = s.c0;
  j["note"] = s.note;
  return j;
}

nlohmann::ordered_json to_json(const Vec3& v) { return nlohmann::ordered_json::array({v.x(), v.y(), v.z()}); }

}  // namespace vld
