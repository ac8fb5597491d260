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

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>

#include "vld/error.hpp"

namespace vld {

using Vec3 = Eigen::Vector3d;
using Index = Eigen::Index;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on [0,lx)x[0,ly)x[0,lz). Arrays are x-fastest.
struct Grid3 {
  int nx = 32, ny = 32, nz = 32;
  double lx = kTwoPi, ly = kTwoPi, lz = kTwoPi;

  static Grid3 cube(int n, double l = kTwoPi) { return {n, n, n, l, l, l}; }

  /// Throws ConfigError unless every axis has an even count >= 4 and a
  /// positive length.
  void validate() const;

  Index size() const { return Index(nx) * ny * nz; }
  int n(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  double l(int axis) const { return axis == 0 ? lx : (axis == 1 ? ly : lz); }
  double h(int axis) const { return l(axis) / n(axis); }
  double min_spacing() const;
  double cell_volume() const { return h(0) * h(1) * h(2); }
  Vec3 lengths() const { return {lx, ly, lz}; }

  Index index(int i, int j, int k) const {
    return Index(i) + Index(nx) * (Index(j) + Index(ny) * Index(k));
  }
  /// Index with periodic wrap of each coordinate.
  Index wrapped_index(int i, int j, int k) const {
    return index(wrap(i, nx), wrap(j, ny), wrap(k, nz));
  }
  std::array<int, 3> coords(Index idx) const {
    const int i = int(idx % nx);
    const int j = int((idx / nx) % ny);
    const int k = int(idx / (Index(nx) * ny));
    return {i, j, k};
  }
  Vec3 node(int i, int j, int k) const { return {i * h(0), j * h(1), k * h(2)}; }
  Vec3 node(Index idx) const {
    const auto c = coords(idx);
    return node(c[0], c[1], c[2]);
  }

  /// Shortest periodic displacement from a to b.
  Vec3 min_image(const Vec3& a, const Vec3& b) const;

  static int wrap(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
  }

  bool operator==(const Grid3&) const = default;
};

struct ScalarField3 {
  Grid3 grid;
  Eigen::ArrayXd data;

  ScalarField3() = default;
  explicit ScalarField3(const Grid3& g) : grid(g), data(Eigen::ArrayXd::Zero(g.size())) {}
  ScalarField3(const Grid3& g, Eigen::ArrayXd values);

  double& operator()(int i, int j, int k) { return data[grid.index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data[grid.index(i, j, k)]; }

  template <class F>
  static ScalarField3 from_function(const Grid3& g, F&& f) {
    ScalarField3 out(g);
    for (Index idx = 0; idx < g.size(); ++idx) out.data[idx] = f(g.node(idx));
    return out;
  }
};

struct VectorField3 {
  Grid3 grid;
  std::array<Eigen::ArrayXd, 3> comp;

  VectorField3() = default;
  explicit VectorField3(const Grid3& g);
  VectorField3(const Grid3& g, std::array<Eigen::ArrayXd, 3> c);

  Vec3 at(Index idx) const { return {comp[0][idx], comp[1][idx], comp[2][idx]}; }
  void set(Index idx, const Vec3& v) {
    comp[0][idx] = v.x();
    comp[1][idx] = v.y();
    comp[2][idx] = v.z();
  }
  ScalarField3 component(int c) const { return ScalarField3(grid, comp[c]); }

  template <class F>
  static VectorField3 from_function(const Grid3& g, F&& f) {
    VectorField3 out(g);
    for (Index idx = 0; idx < g.size(); ++idx) out.set(idx, f(g.node(idx)));
    return out;
  }

  VectorField3& operator+=(const VectorField3& o);
  VectorField3& operator-=(const VectorField3& o);
  VectorField3& operator*=(double a);
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(double a, VectorField3 v);

ScalarField3 magnitude(const VectorField3& v);
ScalarField3 dot(const VectorField3& a, const VectorField3& b);
double max_abs(const ScalarField3& s);
/// max over cells of |v|.
double max_norm(const VectorField3& v);
/// Volume integral of s by the periodic trapezoid (= midpoint) rule.
double integrate(const ScalarField3& s);
/// sqrt(integral of |v|^2).
double l2_norm(const VectorField3& v);
Vec3 mean(const VectorField3& v);
bool all_finite(const VectorField3& v);

void require_same_grid(const Grid3& a, const Grid3& b, const char* what);

}  // namespace vld
