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

#include <array>

#include "vld/grid.hpp"

namespace vld {

/// Point-sampling scheme. `trilinear` is the default for `sample`; the
/// Lagrange schemes (4- and 6-point per axis) are used where along-line
/// quantities need high accuracy. `spline5` is the quintic B-spline: its
/// weights must be applied to coefficients from `spline5_coefficients`,
/// never to raw node values. The result is C4 across cell faces, which
/// keeps RK4 at full order when the field is the right-hand side.
enum class Interpolation { trilinear, cubic, quintic, spline5 };

int stencil_width(Interpolation scheme);

/// Tensor-product interpolation stencil at one point (periodic wrap).
struct Stencil {
  int width = 2;
  std::array<std::array<int, 6>, 3> node{};
  std::array<std::array<double, 6>, 3> weight{};

  template <class F>
  void for_each(const Grid3& g, F&& f) const {
    for (int c = 0; c < width; ++c) {
      for (int b = 0; b < width; ++b) {
        const double wzy = weight[2][c] * weight[1][b];
        for (int a = 0; a < width; ++a) {
          f(g.index(node[0][a], node[1][b], node[2][c]), weight[0][a] * wzy);
        }
      }
    }
  }
};

Stencil make_stencil(const Grid3& g, const Vec3& x, Interpolation scheme);
/// True when every node the stencil touches is set in `mask`.
bool stencil_valid(const Grid3& g, const Stencil& st, const Mask& mask);

double sample(const ScalarField3& f, const Vec3& x, Interpolation scheme = Interpolation::trilinear);
Vec3 sample(const VectorField3& v, const Vec3& x, Interpolation scheme = Interpolation::trilinear);
double sample(const ScalarField3& f, const Stencil& st);
Vec3 sample(const VectorField3& v, const Stencil& st);

/// Local quintic B-spline quasi-interpolation coefficients of `v`: a
/// truncated inverse of the spline's node symbol, radius 3 per axis.
/// Reproduces quintic polynomials; error O(h^6).
VectorField3 spline5_coefficients(const VectorField3& v);
/// Nodes whose coefficient depends only on nodes set in `mask`.
Mask spline5_valid(const Grid3& g, const Mask& mask);

}  // namespace vld
