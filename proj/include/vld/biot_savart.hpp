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

#include <vector>

#include "vld/grid.hpp"

namespace vld {

/// Free-space Biot-Savart velocity at x by a direct midpoint sum over grid
/// cells: u(x) = (1/4pi) sum_cells omega(y) x (x - y) / |x - y|^3 dV. The
/// cell containing x as a node is omitted; no periodic images are added.
/// Throws NumericalError when omega is not negligible (> 1e-10 max) within
/// a quarter box length of the boundary.
Vec3 bs_velocity(const VectorField3& omega, const Vec3& x);
/// Same for many points; evaluated in parallel, each point summed in a
/// fixed order.
std::vector<Vec3> bs_velocity(const VectorField3& omega, const std::vector<Vec3>& points);
/// The compact-support precondition on its own.
void check_compact_support(const VectorField3& omega);

/// Periodic inversion u = curl (-Laplacian)^{-1} omega. Throws DomainError
/// listing the component means when omega is not mean-free.
VectorField3 bs_spectral_invert(const VectorField3& omega);

/// Bound terms from splitting the Biot-Savart integral at radius rho.
struct CutoffSplit {
  double rho = 0.0;
  double near_term = 0.0;
  double far_bs_term = 0.0;
  double far_grad_term = 0.0;
  double total_bound = 0.0;
};

/// near  = (1/4pi) Omega int_{|y|<=2rho} |y|^-2 dy = 2 Omega rho;
/// far_bs   = ||u||_2 (int_{|y|>=rho} |y|^-6 dy)^{1/2} = ||u||_2 (4pi/3)^{1/2} rho^{-3/2};
/// far_grad = ||u||_2 (int_{|y|>=rho} rho^-2 |y|^-4 dy)^{1/2} = ||u||_2 (4pi)^{1/2} rho^{-3/2}.
CutoffSplit cutoff_bound(double Omega, double u_l2, double rho);

/// rho = Omega^{-2/5}, which balances Omega rho against rho^{-3/2}.
double optimal_rho(double Omega);

struct VelocityBoundReport {
  double U_measured = 0.0;
  double Omega = 0.0;
  double u_l2 = 0.0;
  double rho_used = 0.0;
  double bound_value = 0.0;
  double ratio = 0.0;  // U_measured / Omega^{3/5}
  bool pass = false;
};

/// Compares max |u| with cutoff_bound(Omega, ||u||_2, optimal_rho(Omega)).
/// When `u_l2_reference` is positive it is used as the conserved L2 norm
/// after checking the measured norm agrees to 1e-6 relative.
VelocityBoundReport check_35_bound(const VectorField3& u, const VectorField3& omega, double u_l2_reference = 0.0);

}  // namespace vld
