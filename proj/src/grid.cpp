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
#include "vld/grid.hpp"

#include <algorithm>
#include <string>

namespace vld {

void Grid3::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (n(a) < 4 || n(a) % 2 != 0) {
      throw ConfigError("grid axis " + std::to_string(a) + " has " + std::to_string(n(a)) +
                        " points; need an even count >= 4");
    }
    if (!(l(a) > 0.0) || !std::isfinite(l(a))) {
      throw ConfigError("grid axis " + std::to_string(a) + " has non-positive length");
    }
  }
}

double Grid3::min_spacing() const { return std::min({h(0), h(1), h(2)}); }

Vec3 Grid3::min_image(const Vec3& a, const Vec3& b) const {
  Vec3 d = b - a;
  for (int c = 0; c < 3; ++c) d[c] -= l(c) * std::round(d[c] / l(c));
  return d;
}

ScalarField3::ScalarField3(const Grid3& g, Eigen::ArrayXd values) : grid(g), data(std::move(values)) {
  if (data.size() != g.size()) throw ConfigError("scalar field length does not match grid");
}

VectorField3::VectorField3(const Grid3& g) : grid(g) {
  for (auto& c : comp) c = Eigen::ArrayXd::Zero(g.size());
}

VectorField3::VectorField3(const Grid3& g, std::array<Eigen::ArrayXd, 3> c) : grid(g), comp(std::move(c)) {
  for (const auto& a : comp) {
    if (a.size() != g.size()) throw ConfigError("vector field component length does not match grid");
  }
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": fields live on different grids");
}

VectorField3& VectorField3::operator+=(const VectorField3& o) {
  require_same_grid(grid, o.grid, "operator+=");
  for (int c = 0; c < 3; ++c) comp[c] += o.comp[c];
  return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& o) {
  require_same_grid(grid, o.grid, "operator-=");
  for (int c = 0; c < 3; ++c) comp[c] -= o.comp[c];
  return *this;
}

VectorField3& VectorField3::operator*=(double a) {
  for (auto& c : comp) c *= a;
  return *this;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(double a, VectorField3 v) { return v *= a; }

ScalarField3 magnitude(const VectorField3& v) {
  return ScalarField3(v.grid, (v.comp[0].square() + v.comp[1].square() + v.comp[2].square()).sqrt());
}

ScalarField3 dot(const VectorField3& a, const VectorField3& b) {
  require_same_grid(a.grid, b.grid, "dot");
  return ScalarField3(a.grid, a.comp[0] * b.comp[0] + a.comp[1] * b.comp[1] + a.comp[2] * b.comp[2]);
}

double max_abs(const ScalarField3& s) { return s.data.size() ? s.data.abs().maxCoeff() : 0.0; }

double max_norm(const VectorField3& v) { return max_abs(magnitude(v)); }

double integrate(const ScalarField3& s) {
  // Sequential sum: fixed reduction order.
  double acc = 0.0;
  for (Index i = 0; i < s.data.size(); ++i) acc += s.data[i];
  return acc * s.grid.cell_volume();
}

double l2_norm(const VectorField3& v) { return std::sqrt(integrate(dot(v, v))); }

Vec3 mean(const VectorField3& v) {
  Vec3 m;
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (Index i = 0; i < v.comp[c].size(); ++i) acc += v.comp[c][i];
    m[c] = acc / double(v.grid.size());
  }
  return m;
}

bool all_finite(const VectorField3& v) {
  for (const auto& c : v.comp) {
    if (!c.isFinite().all()) return false;
  }
  return true;
}

}  // namespace vld
