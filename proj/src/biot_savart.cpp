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
#include "vld/biot_savart.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vld/error.hpp"
#include "vld/format.hpp"
#include "vld/parallel.hpp"
#include "vld/spectral.hpp"

namespace vld {

namespace {

Vec3 direct_sum(const VectorField3& omega, const Vec3& x) {
  const Grid3& g = omega.grid;
  // Cell centred on the node nearest to x; skipped as the singular cell.
  const int si = int(std::lround(x.x() / g.h(0)));
  const int sj = int(std::lround(x.y() / g.h(1)));
  const int sk = int(std::lround(x.z() / g.h(2)));
  // r = y - x, integrand r x omega(y) / |r|^3.
  double ux = 0.0, uy = 0.0, uz = 0.0;
  for (int k = 0; k < g.nz; ++k) {
    const double rz = k * g.h(2) - x.z();
    for (int j = 0; j < g.ny; ++j) {
      const double ry = j * g.h(1) - x.y();
      const Index row = g.index(0, j, k);
      for (int i = 0; i < g.nx; ++i) {
        if (i == si && j == sj && k == sk) continue;
        const double rx = i * g.h(0) - x.x();
        const double r2 = rx * rx + ry * ry + rz * rz;
        const double inv3 = 1.0 / (r2 * std::sqrt(r2));
        const double wx = omega.comp[0][row + i], wy = omega.comp[1][row + i], wz = omega.comp[2][row + i];
        ux += (ry * wz - rz * wy) * inv3;
        uy += (rz * wx - rx * wz) * inv3;
        uz += (rx * wy - ry * wx) * inv3;
      }
    }
  }
  return Vec3(ux, uy, uz) * (g.cell_volume() / (4.0 * std::numbers::pi));
}

}  // namespace

void check_compact_support(const VectorField3& omega) {
  const Grid3& g = omega.grid;
  const ScalarField3 m = magnitude(omega);
  const double peak = max_abs(m);
  if (peak == 0.0) return;
  double edge = 0.0;
  for (Index idx = 0; idx < g.size(); ++idx) {
    const Vec3 p = g.node(idx);
    bool near = false;
    for (int a = 0; a < 3; ++a) {
      const double margin = 0.25 * g.l(a);
      if (p[a] < margin || p[a] > g.l(a) - margin) near = true;
    }
    if (near) edge = std::max(edge, m.data[idx]);
  }
  if (edge > 1e-10 * peak) {
    throw NumericalError("vorticity not compactly supported; free-space BS invalid (boundary |omega|/max = " +
                         fmt17(edge / peak) + ")");
  }
}

Vec3 bs_velocity(const VectorField3& omega, const Vec3& x) {
  check_compact_support(omega);
  return direct_sum(omega, x);
}

std::vector<Vec3> bs_velocity(const VectorField3& omega, const std::vector<Vec3>& points) {
  check_compact_support(omega);
  std::vector<Vec3> out(points.size());
  parallel_for(points.size(), [&](std::size_t p) { out[p] = direct_sum(omega, points[p]); });
  return out;
}

VectorField3 bs_spectral_invert(const VectorField3& omega) {
  const Vec3 m = mean(omega);
  const double scale = std::max(1.0, max_norm(omega));
  if (m.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("bs_spectral_invert: vorticity must be mean-free; component means = (" + fmt17(m.x()) + ", " +
                      fmt17(m.y()) + ", " + fmt17(m.z()) + ")");
  }
  const auto ops = SpectralOps::for_grid(omega.grid);
  SpectralVector u = ops->curl(ops->forward(omega));
  for (Index i = 0; i < ops->spectral_size(); ++i) {
    const double k2 = ops->k2()[i];
    for (int c = 0; c < 3; ++c) u[c][i] = k2 > 0.0 ? u[c][i] / k2 : Complex(0.0);
  }
  return ops->inverse(u);
}

CutoffSplit cutoff_bound(double Omega, double u_l2, double rho) {
  if (!(rho > 0.0)) throw DomainError("cutoff_bound: rho must be > 0");
  if (!(Omega >= 0.0)) throw DomainError("cutoff_bound: Omega must be >= 0");
  if (!(u_l2 >= 0.0)) throw DomainError("cutoff_bound: u_l2 must be >= 0");
  CutoffSplit c;
  c.rho = rho;
  // (1/4pi) Omega int_{|y|<=2rho} |y|^-2 dy, the shell integral being 4pi * 2rho.
  c.near_term = 2.0 * Omega * rho;
  // Schwarz with int_rho^inf r^-6 4pi r^2 dr = 4pi / (3 rho^3).
  c.far_bs_term = u_l2 * std::sqrt(4.0 * std::numbers::pi / 3.0) * std::pow(rho, -1.5);
  // (1/rho) times Schwarz with int_rho^inf r^-4 4pi r^2 dr = 4pi / rho.
  c.far_grad_term = u_l2 * std::sqrt(4.0 * std::numbers::pi) * std::pow(rho, -1.5);
  c.total_bound = c.near_term + c.far_bs_term + c.far_grad_term;
  return c;
}

double optimal_rho(double Omega) {
  if (!(Omega > 0.0)) throw DomainError("optimal_rho: Omega must be > 0");
  // exp2 form keeps powers of two exact: 32 -> 0.25.
  return std::exp2(-0.4 * std::log2(Omega));
}

VelocityBoundReport check_35_bound(const VectorField3& u, const VectorField3& omega, double u_l2_reference) {
  require_same_grid(u.grid, omega.grid, "check_35_bound");
  VelocityBoundReport r;
  r.U_measured = max_norm(u);
  r.Omega = max_norm(omega);
  const double measured_l2 = l2_norm(u);
  if (u_l2_reference > 0.0) {
    if (std::abs(measured_l2 - u_l2_reference) > 1e-6 * u_l2_reference) {
      throw NumericalError("check_35_bound: L2 norm drifted from " + fmt17(u_l2_reference) + " to " +
                           fmt17(measured_l2));
    }
    r.u_l2 = u_l2_reference;
  } else {
    r.u_l2 = measured_l2;
  }
  if (r.Omega > 0.0) {
    r.rho_used = optimal_rho(r.Omega);
    r.bound_value = cutoff_bound(r.Omega, r.u_l2, r.rho_used).total_bound;
    r.ratio = r.U_measured / std::pow(r.Omega, 0.6);
  } else {
    // Without vorticity the bound decays as rho grows; its infimum is 0.
    r.rho_used = HUGE_VAL;
    r.bound_value = 0.0;
    r.ratio = r.U_measured > 0.0 ? HUGE_VAL : 0.0;
  }
  r.pass = r.U_measured <= r.bound_value;
  return r;
}

}  // namespace vld
