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
#include "vld/fields.hpp"

#include <cmath>
#include <random>

#include "vld/interp.hpp"
#include "vld/spectral.hpp"

namespace vld {
namespace {

void check_positive_finite(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

VectorField3 tubes_vorticity(const AntiparallelTubes& p, const Grid3& g) {
  const double cx = 0.5 * g.lx, cy = 0.5 * g.ly;
  const double amp = p.circulation / (kTwoPi * p.core_radius * p.core_radius);
  const double delta = p.perturbation * p.separation;
  const double kz = kTwoPi / g.lz;
  const double inv2s2 = 1.0 / (2.0 * p.core_radius * p.core_radius);
  return VectorField3::from_function(g, [&](const Vec3& x) {
    Vec3 w = Vec3::Zero();
    const double wave = std::cos(kz * x.z());
    const double slope = -delta * kz * std::sin(kz * x.z());
    for (int tube = 0; tube < 2; ++tube) {
      const double sign = tube == 0 ? 1.0 : -1.0;
      const double xc = cx - sign * (0.5 * p.separation - delta * wave);
      // Tangent of the centerline (dx/dz, 0, 1), oriented by the tube's sign.
      Vec3 t(sign * slope, 0.0, 1.0);
      t.normalize();
      double profile = 0.0;
      for (int ix = -1; ix <= 1; ++ix) {
        for (int iy = -1; iy <= 1; ++iy) {
          const double dx = x.x() - xc + ix * g.lx;
          const double dy = x.y() - cy + iy * g.ly;
          profile += std::exp(-(dx * dx + dy * dy) * inv2s2);
        }
      }
      w += sign * amp * profile * t;
    }
    return w;
  });
}

VectorField3 shear_layer(const ShearLayer& p, const Grid3& g) {
  const double y1 = 0.25 * g.ly, y2 = 0.75 * g.ly;
  auto u = VectorField3::from_function(g, [&](const Vec3& x) {
    const double ux = std::tanh((x.y() - y1) / p.thickness) - std::tanh((x.y() - y2) / p.thickness) - 1.0;
    const double uy = p.perturbation * std::sin(kTwoPi * x.x() / g.lx);
    const double uz = p.perturbation * std::cos(kTwoPi * x.y() / g.ly);
    return Vec3(ux, uy, uz);
  });
  return solenoidal_project(u);
}

VectorField3 random_solenoidal(const RandomSolenoidal& p, const Grid3& g) {
  const auto ops = SpectralOps::for_grid(g);
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralVector spec;
  for (auto& c : spec) c = SpectralArray::Zero(ops->spectral_size());
  const double exponent = 0.5 * (p.spectrum_slope - 2.0);
  for (Index s = 0; s < ops->spectral_size(); ++s) {
    // Draw for every mode so the stream does not depend on the mask.
    Complex draws[3];
    for (auto& d : draws) {
      const double re = normal(rng);
      const double im = normal(rng);
      d = Complex(re, im);
    }
    const auto m = ops->mode(s);
    const double kmag = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    if (kmag == 0.0 || !ops->dealias_mask()[s]) continue;
    const double amp = std::pow(kmag, exponent);
    for (int c = 0; c < 3; ++c) spec[c][s] = amp * draws[c];
  }
  ops->project(spec);
  VectorField3 u = ops->inverse(spec);
  // The c2r transform symmetrizes the kx = 0 plane; project once more in
  // physical form so the stored field is exactly solenoidal to rounding.
  u = solenoidal_project(u);
  const double rms = std::sqrt(integrate(dot(u, u)) / (g.lx * g.ly * g.lz));
  if (rms > 0.0) u *= 1.0 / rms;
  return u;
}

}  // namespace

Vec3 abc_velocity(const Vec3& x, const AbcFlow& p) {
  return {p.A * std::sin(x.z()) + p.C * std::cos(x.y()), p.B * std::sin(x.x()) + p.A * std::cos(x.z()),
          p.C * std::sin(x.y()) + p.B * std::cos(x.x())};
}

Vec3 taylor_green_velocity(const Vec3& x) {
  return {std::sin(x.x()) * std::cos(x.y()) * std::cos(x.z()), -std::cos(x.x()) * std::sin(x.y()) * std::cos(x.z()),
          0.0};
}

VectorField3 gen_field(const FieldKind& kind, const Grid3& grid) {
  grid.validate();
  return std::visit(
      [&](const auto& p) -> VectorField3 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AbcFlow>) {
          return VectorField3::from_function(grid, [&](const Vec3& x) { return abc_velocity(x, p); });
        } else if constexpr (std::is_same_v<T, TaylorGreen>) {
          return VectorField3::from_function(grid, taylor_green_velocity);
        } else if constexpr (std::is_same_v<T, AntiparallelTubes>) {
          check_positive_finite(p.separation, "tube separation");
          check_positive_finite(p.core_radius, "tube core radius");
          if (!(p.core_radius < 0.5 * p.separation)) throw ConfigError("tube core radius must be < separation/2");
          if (p.circulation == 0.0 || !std::isfinite(p.circulation))
            throw ConfigError("tube circulation must be nonzero");
          if (p.separation >= grid.lx) throw ConfigError("tube separation must be smaller than the box");
          if (!(p.perturbation >= 0.0 && p.perturbation < 0.5))
            throw ConfigError("tube perturbation must be in [0, 0.5)");
          return velocity_from_vorticity(solenoidal_project(tubes_vorticity(p, grid)));
        } else if constexpr (std::is_same_v<T, ShearLayer>) {
          check_positive_finite(p.thickness, "shear layer thickness");
          return shear_layer(p, grid);
        } else {
          return random_solenoidal(p, grid);
        }
      },
      kind);
}

VectorField3 vortex_ring_vorticity(const Grid3& grid, const Vec3& center, double radius, double circulation,
                                   double core_sigma) {
  check_positive_finite(radius, "ring radius");
  check_positive_finite(core_sigma, "ring core width");
  const double amp = circulation / (kTwoPi * core_sigma * core_sigma);
  const double inv2s2 = 1.0 / (2.0 * core_sigma * core_sigma);
  return VectorField3::from_function(grid, [&](const Vec3& x) {
    const Vec3 d = x - center;
    const double rho = std::hypot(d.x(), d.y());
    if (rho == 0.0) return Vec3(Vec3::Zero());
    const double dr = rho - radius;
    const double mag = amp * std::exp(-(dr * dr + d.z() * d.z()) * inv2s2);
    return Vec3(-mag * d.y() / rho, mag * d.x() / rho, 0.0);
  });
}

VectorField3 velocity_from_vorticity(const VectorField3& omega) {
  const auto ops = SpectralOps::for_grid(omega.grid);
  const auto w = ops->forward(omega);
  const Eigen::ArrayXd inv_k2 = (ops->k2() > 0.0).select(ops->k2().inverse(), 0.0);
  SpectralVector u = ops->curl(w);
  for (auto& c : u) c *= inv_k2;
  return ops->inverse(u);
}

MaskedDirectionField unit_vorticity(const VectorField3& omega, double eps_rel) {
  if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw DomainError("eps_rel must lie in (0, 1)");
  const ScalarField3 mag = magnitude(omega);
  const double peak = max_abs(mag);
  if (!(peak > 0.0)) throw NumericalError("empty direction field: vorticity is identically zero");
  MaskedDirectionField out;
  out.threshold = eps_rel * peak;
  out.xi = VectorField3(omega.grid);
  out.valid = Mask::Constant(omega.grid.size(), false);
  for (Index i = 0; i < omega.grid.size(); ++i) {
    const double m = mag.data[i];
    if (m >= out.threshold && m > 0.0) {
      out.valid[i] = true;
      out.xi.set(i, omega.at(i) / m);
    }
  }
  out.xi_spline = spline5_coefficients(out.xi);
  out.spline_valid = spline5_valid(omega.grid, out.valid);
  return out;
}

DirectionDerivatives direction_derivative_fields(const MaskedDirectionField& field, double kappa_floor) {
  const Grid3& g = field.xi.grid;
  // 8th-order centered first-derivative weights for offsets 1..4.
  constexpr int kHalf = 4;
  constexpr double c[kHalf] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  DirectionDerivatives out{ScalarField3(g), ScalarField3(g), VectorField3(g), VectorField3(g),
                           Mask::Constant(g.size(), false), kappa_floor};
  const double inv_h[3] = {1.0 / g.h(0), 1.0 / g.h(1), 1.0 / g.h(2)};
  for (int k = 0; k < g.nz; ++k) {
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const Index idx = g.index(i, j, k);
        if (!field.valid[idx]) continue;
        // grad[a] = d xi / d x_a
        Vec3 grad[3];
        bool ok = true;
        for (int a = 0; a < 3 && ok; ++a) {
          Vec3 acc = Vec3::Zero();
          for (int o = 1; o <= kHalf; ++o) {
            const int di = a == 0 ? o : 0, dj = a == 1 ? o : 0, dk = a == 2 ? o : 0;
            const Index ip = g.wrapped_index(i + di, j + dj, k + dk);
            const Index im = g.wrapped_index(i - di, j - dj, k - dk);
            if (!field.valid[ip] || !field.valid[im]) {
              ok = false;
              break;
            }
            acc += c[o - 1] * (field.xi.at(ip) - field.xi.at(im));
          }
          grad[a] = acc * inv_h[a];
        }
        if (!ok) continue;
        const Vec3 xi = field.xi.at(idx);
        const double div = grad[0].x() + grad[1].y() + grad[2].z();
        const Vec3 bend = xi.x() * grad[0] + xi.y() * grad[1] + xi.z() * grad[2];
        const double kappa = bend.norm();
        out.valid[idx] = true;
        out.div_xi.data[idx] = div;
        out.kappa.data[idx] = kappa;
        out.bend.set(idx, bend);
        if (kappa >= kappa_floor) out.normal.set(idx, bend / kappa);
      }
    }
  }
  return out;
}

}  // namespace vld
