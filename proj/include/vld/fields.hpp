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

#include <cstdint>
#include <variant>

#include "vld/grid.hpp"

namespace vld {

// ---------------------------------------------------------------------------
// Analytic generators. All return a divergence-free velocity on the grid.

struct AbcFlow {
  double A = 1.0, B = 1.0, C = 1.0;
};
struct TaylorGreen {};
/// Two opposite-signed Gaussian-core tubes along z, displaced towards each
/// other by a cos(z) perturbation of amplitude `perturbation * separation`.
struct AntiparallelTubes {
  double separation = std::numbers::pi;
  double core_radius = 0.3;
  double circulation = 1.0;
  double perturbation = 0.125;
};
/// Periodic double tanh shear layer with a small cross-stream kick.
struct ShearLayer {
  double thickness = std::numbers::pi / 15.0;
  double perturbation = 0.05;
};
/// Random-phase field with energy spectrum ~ k^slope, band-limited to the
/// 2/3-rule range, unit rms velocity.
struct RandomSolenoidal {
  std::uint64_t seed = 1;
  double spectrum_slope = -5.0 / 3.0;
};

using FieldKind = std::variant<AbcFlow, TaylorGreen, AntiparallelTubes, ShearLayer, RandomSolenoidal>;

VectorField3 gen_field(const FieldKind& kind, const Grid3& grid);

Vec3 abc_velocity(const Vec3& x, const AbcFlow& p = {});
Vec3 taylor_green_velocity(const Vec3& x);

/// Thin Gaussian-core vortex ring in the plane z = center.z(), vorticity
/// along the azimuthal direction (counter-clockwise about +z).
VectorField3 vortex_ring_vorticity(const Grid3& grid, const Vec3& center, double radius, double circulation,
                                   double core_sigma);

/// u = curl (-Laplacian)^{-1} omega on the periodic box. The k = 0 mode of
/// omega is discarded; see bs_spectral_invert for the checked variant.
VectorField3 velocity_from_vorticity(const VectorField3& omega);

// ---------------------------------------------------------------------------
// Direction field of vorticity.

/// xi = omega/|omega| where |omega| >= threshold, zero elsewhere.
struct MaskedDirectionField {
  VectorField3 xi;
  /// Quintic B-spline coefficients of `xi` and their validity, used by
  /// line tracing.
  VectorField3 xi_spline;
  Mask spline_valid;
  Mask valid;
  double threshold = 0.0;
};

inline constexpr double kDefaultEpsRel = 1e-8;
inline constexpr double kDefaultKappaFloor = 1e-10;

MaskedDirectionField unit_vorticity(const VectorField3& omega, double eps_rel = kDefaultEpsRel);

/// Geometry of the direction field: div xi, the curvature vector
/// (xi.grad) xi = kappa n, its length kappa and the principal normal n.
/// Derivatives are 8th-order centered differences; a cell is valid only if
/// its whole stencil lies in the xi mask. Off-grid curvature should be taken
/// as the length of the interpolated `bend`, which stays smooth where kappa
/// passes through zero.
struct DirectionDerivatives {
  ScalarField3 div_xi;
  ScalarField3 kappa;
  VectorField3 normal;
  VectorField3 bend;
  Mask valid;
  double kappa_floor = kDefaultKappaFloor;
};

DirectionDerivatives direction_derivative_fields(const MaskedDirectionField& xi,
                                                 double kappa_floor = kDefaultKappaFloor);

}  // namespace vld
