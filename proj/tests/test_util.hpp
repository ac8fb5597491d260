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

#include <cmath>
#include <numbers>

#include "vld/fields.hpp"
#include "vld/spectral.hpp"

namespace vld::testing {

inline constexpr double kPi = std::numbers::pi;

inline VectorField3 abc_field(int n, const AbcFlow& p = {}) {
  return VectorField3::from_function(Grid3::cube(n), [&](const Vec3& x) { return abc_velocity(x, p); });
}

inline VectorField3 tg_field(int n) {
  return VectorField3::from_function(Grid3::cube(n), [](const Vec3& x) { return taylor_green_velocity(x); });
}

/// Unit-magnitude azimuthal field about the vertical axis through (c, c).
inline VectorField3 azimuthal_field(int n, double c = kPi) {
  return VectorField3::from_function(Grid3::cube(n), [c](const Vec3& x) {
    const double dx = x.x() - c, dy = x.y() - c;
    const double r = std::hypot(dx, dy);
    return r > 0.0 ? Vec3(-dy / r, dx / r, 0.0) : Vec3::Zero();
  });
}

/// omega = (1, 0, sin x): vortex lines bend, |omega| varies along them.
inline VectorField3 sinx_vorticity(int n, double scale = 1.0) {
  return VectorField3::from_function(Grid3::cube(n),
                                     [scale](const Vec3& x) { return Vec3(scale, 0.0, scale * std::sin(x.x())); });
}

}  // namespace vld::testing
