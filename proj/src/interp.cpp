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
#include "vld/interp.hpp"

#include <cmath>

namespace vld {
namespace {

constexpr std::array<int, 6> kLinearOffsets{0, 1, 0, 0, 0, 0};
constexpr std::array<int, 6> kCubicOffsets{-1, 0, 1, 2, 0, 0};
constexpr std::array<int, 6> kQuinticOffsets{-2, -1, 0, 1, 2, 3};

const std::array<int, 6>& offsets(Interpolation s) {
  switch (s) {
    case Interpolation::trilinear: return kLinearOffsets;
    case Interpolation::cubic: return kCubicOffsets;
    case Interpolation::quintic:
    case Interpolation::spline5: return kQuinticOffsets;
  }
  return kLinearOffsets;
}

// Centered cardinal quintic B-spline.
double bspline5(double x) {
  const double a = std::abs(x);
  auto p5 = [](double v) { return v > 0.0 ? v * v * v * v * v : 0.0; };
  return (p5(3.0 - a) - 6.0 * p5(2.0 - a) + 15.0 * p5(1.0 - a)) / 120.0;
}

}  // namespace

int stencil_width(Interpolation s) {
  switch (s) {
    case Interpolation::trilinear: return 2;
    case Interpolation::cubic: return 4;
    case Interpolation::quintic:
    case Interpolation::spline5: return 6;
  }
  return 2;
}

Stencil make_stencil(const Grid3& g, const Vec3& x, Interpolation scheme) {
  Stencil st;
  st.width = stencil_width(scheme);
  const auto& off = offsets(scheme);
  for (int axis = 0; axis < 3; ++axis) {
    const int n = g.n(axis);
    const double q = x[axis] / g.h(axis);
    const double fl = std::floor(q);
    const double t = q - fl;
    const int base = Grid3::wrap(int(std::fmod(fl, double(n))), n);
    for (int a = 0; a < st.width; ++a) {
      st.node[axis][a] = Grid3::wrap(base + off[a], n);
      if (scheme == Interpolation::spline5) {
        st.weight[axis][a] = bspline5(t - off[a]);
        continue;
      }
      // Lagrange basis polynomial for node off[a] evaluated at t.
      double w = 1.0;
      for (int b = 0; b < st.width; ++b) {
        if (b != a) w *= (t - off[b]) / double(off[a] - off[b]);
      }
      st.weight[axis][a] = w;
    }
  }
  return st;
}

bool stencil_valid(const Grid3& g, const Stencil& st, const Mask& mask) {
  bool ok = true;
  st.for_each(g, [&](Index idx, double) { ok = ok && mask[idx]; });
  return ok;
}

VectorField3 spline5_coefficients(const VectorField3& v) {
  // c = (1 - d2/4 + 13 d4/240 - 11 d6/960) f per axis, d2..d6 the central
  // even differences; inverts (1, 26, 66, 26, 1)/120 to O(h^8).
  constexpr double w[4] = {1.0 + 0.5 + 78.0 / 240.0 + 220.0 / 960.0, -0.25 - 52.0 / 240.0 - 165.0 / 960.0,
                           13.0 / 240.0 + 66.0 / 960.0, -11.0 / 960.0};
  const Grid3& g = v.grid;
  VectorField3 cur = v;
  for (int axis = 0; axis < 3; ++axis) {
    VectorField3 next(g);
    for (int k = 0; k < g.nz; ++k) {
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const std::array<int, 3> p{i, j, k};
          const Index idx = g.index(i, j, k);
          for (int c = 0; c < 3; ++c) {
            double acc = w[0] * cur.comp[c][idx];
            for (int o = 1; o <= 3; ++o) {
              auto lo = p, hi = p;
              lo[axis] -= o;
              hi[axis] += o;
              acc += w[o] * (cur.comp[c][g.wrapped_index(lo[0], lo[1], lo[2])] + cur.comp[c][g.wrapped_index(hi[0], hi[1], hi[2])]);
            }
            next.comp[c][idx] = acc;
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

Mask spline5_valid(const Grid3& g, const Mask& mask) {
  Mask cur = mask;
  for (int axis = 0; axis < 3; ++axis) {
    Mask next = cur;
    for (int k = 0; k < g.nz; ++k) {
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const std::array<int, 3> p{i, j, k};
          bool ok = true;
          for (int o = -3; o <= 3 && ok; ++o) {
            auto q = p;
            q[axis] += o;
            ok = cur[g.wrapped_index(q[0], q[1], q[2])];
          }
          next[g.index(i, j, k)] = ok;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

double sample(const ScalarField3& f, const Stencil& st) {
  double acc = 0.0;
  st.for_each(f.grid, [&](Index idx, double w) { acc += w * f.data[idx]; });
  return acc;
}

Vec3 sample(const VectorField3& v, const Stencil& st) {
  Vec3 acc = Vec3::Zero();
  st.for_each(v.grid, [&](Index idx, double w) {
    acc.x() += w * v.comp[0][idx];
    acc.y() += w * v.comp[1][idx];
    acc.z() += w * v.comp[2][idx];
  });
  return acc;
}

double sample(const ScalarField3& f, const Vec3& x, Interpolation scheme) {
  return sample(f, make_stencil(f.grid, x, scheme));
}

Vec3 sample(const VectorField3& v, const Vec3& x, Interpolation scheme) {
  return sample(v, make_stencil(v.grid, x, scheme));
}

}  // namespace vld
