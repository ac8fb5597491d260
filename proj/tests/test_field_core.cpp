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
#include <cmath>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "vld/error.hpp"
#include "vld/interp.hpp"

using namespace vld;
using namespace vld::testing;

namespace {

double max_diff(const VectorField3& a, const VectorField3& b) { return max_norm(a - b); }

// 8th-order central difference of f along e with step h.
template <class F>
Vec3 d8(F&& f, const Vec3& x, const Vec3& e, double h) {
  const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  Vec3 acc = Vec3::Zero();
  for (int m = 1; m <= 4; ++m) acc += c[m - 1] * (f(x + m * h * e) - f(x - m * h * e));
  return acc / h;
}

}  // namespace

TEST_SUITE("field_core") {
  TEST_CASE("grid validation rejects odd or tiny axes") {
    CHECK_NOTHROW(Grid3::cube(4).validate());
    CHECK_THROWS_AS(Grid3::cube(5).validate(), ConfigError);
    CHECK_THROWS_AS(Grid3::cube(2).validate(), ConfigError);
    Grid3 g = Grid3::cube(8);
    g.ly = 0.0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    CHECK_THROWS_AS(curl(VectorField3(Grid3::cube(7))), ConfigError);
  }

  TEST_CASE("x-fastest layout") {
    const Grid3 g{4, 6, 8, 1.0, 2.0, 3.0};
    CHECK(g.index(1, 0, 0) == 1);
    CHECK(g.index(0, 1, 0) == 4);
    CHECK(g.index(0, 0, 1) == 24);
    const auto c = g.coords(g.index(3, 5, 7));
    CHECK(c[0] == 3);
    CHECK(c[1] == 5);
    CHECK(c[2] == 7);
  }

  TEST_CASE("curl of ABC is the field itself") {
    const VectorField3 u = abc_field(32);
    CHECK(max_diff(curl(u), u) <= 1e-12);
  }

  TEST_CASE("analytic curl and derivative") {
    const Grid3 g = Grid3::cube(32);
    const auto u = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(0, std::sin(x.x()), 0); });
    const auto w = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(0, 0, std::cos(x.x())); });
    CHECK(max_diff(curl(u), w) <= 1e-12);
    const auto v = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(std::sin(x.x()), 0, 0); });
    const auto dv = ScalarField3::from_function(g, [](const Vec3& x) { return std::cos(x.x()); });
    CHECK(max_abs(ScalarField3(g, divergence(v).data - dv.data)) <= 1e-12);
  }

  TEST_CASE("curl output is mean-free") {
    const Grid3 g = Grid3::cube(16);
    const auto u = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(1.0 + std::sin(x.y()), 2.0, x.x() * 0.0 + 3.0); });
    CHECK(mean(curl(u)).norm() <= 1e-14);
  }

  TEST_CASE("div curl and curl grad vanish for random fields") {
    const Grid3 g = Grid3::cube(32);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    VectorField3 v(g);
    ScalarField3 phi(g);
    for (int c = 0; c < 3; ++c) {
      for (Index i = 0; i < g.size(); ++i) v.comp[c][i] = nd(rng);
    }
    for (Index i = 0; i < g.size(); ++i) phi.data[i] = nd(rng);
    CHECK(max_abs(divergence(curl(v))) <= 1e-12 * std::max(1.0, max_norm(v)) * 32);
    CHECK(max_norm(curl(gradient(phi))) <= 1e-12 * 32);
    const VectorField3 u = gen_field(RandomSolenoidal{3, -5.0 / 3.0}, g);
    CHECK(max_abs(divergence(curl(u))) <= 1e-12);
  }

  TEST_CASE("divergence of Taylor-Green and of constants") {
    CHECK(max_abs(divergence(tg_field(32))) <= 1e-12);
    const Grid3 g = Grid3::cube(16);
    const auto c = VectorField3::from_function(g, [](const Vec3&) { return Vec3(1.5, -2.0, 0.25); });
    CHECK(max_abs(divergence(c)) == 0.0);
  }

  TEST_CASE("Leray projection") {
    const Grid3 g = Grid3::cube(32);
    const VectorField3 tg = tg_field(32);
    CHECK(max_diff(solenoidal_project(tg), tg) <= 1e-12);
    const auto grad = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(std::cos(x.x()), 0, 0); });
    CHECK(max_norm(solenoidal_project(grad)) <= 1e-12);
    CHECK(max_diff(solenoidal_project(tg + grad), tg) <= 1e-12);
    const VectorField3 r = gen_field(RandomSolenoidal{5, -2.0}, g) + grad;
    const VectorField3 p1 = solenoidal_project(r);
    CHECK(max_diff(solenoidal_project(p1), p1) <= 1e-12);
    CHECK(max_abs(divergence(p1)) <= 1e-12);
  }

  TEST_CASE("unit_vorticity") {
    const Grid3 g = Grid3::cube(8);
    const auto w = VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 5); });
    const MaskedDirectionField xi = unit_vorticity(w);
    CHECK(xi.valid.all());
    CHECK(max_diff(xi.xi, VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 1); })) == 0.0);

    // |omega| vanishes on the plane x = 0.
    const auto wp = VectorField3::from_function(Grid3::cube(16), [](const Vec3& x) { return Vec3(0, 0, std::sin(x.x())); });
    const MaskedDirectionField xp = unit_vorticity(wp, 1e-8);
    const Grid3& gp = xp.xi.grid;
    for (int k = 0; k < 16; ++k) {
      for (int j = 0; j < 16; ++j) {
        CHECK_FALSE(xp.valid[gp.index(0, j, k)]);
        CHECK(xp.xi.at(gp.index(0, j, k)).norm() == 0.0);
        CHECK(xp.valid[gp.index(3, j, k)]);
      }
    }

    const MaskedDirectionField xa = unit_vorticity(curl(abc_field(32)));
    double worst = 0.0;
    for (Index i = 0; i < xa.xi.grid.size(); ++i) {
      if (xa.valid[i]) worst = std::max(worst, std::abs(xa.xi.at(i).norm() - 1.0));
    }
    CHECK(worst <= 1e-12);

    CHECK_THROWS_AS(unit_vorticity(w, 0.0), DomainError);
    CHECK_THROWS_AS(unit_vorticity(w, 1.0), DomainError);
    CHECK_THROWS_WITH_AS(unit_vorticity(VectorField3(g)), doctest::Contains("empty direction field"), NumericalError);
  }

  TEST_CASE("direction derivatives: straight lines") {
    const Grid3 g = Grid3::cube(16);
    const auto w = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(0, 0, 2.0 + std::sin(x.x())); });
    const DirectionDerivatives d = direction_derivative_fields(unit_vorticity(w));
    CHECK(d.valid.all());
    CHECK(max_abs(d.div_xi) == 0.0);
    CHECK(max_abs(d.kappa) == 0.0);
    CHECK(max_norm(d.normal) == 0.0);
    CHECK(max_norm(d.bend) == 0.0);
  }

  TEST_CASE("direction derivatives: circle curvature") {
    const VectorField3 w = azimuthal_field(64);
    const DirectionDerivatives d = direction_derivative_fields(unit_vorticity(w));
    const Grid3& g = w.grid;
    // Points at distance 1 from the axis.
    for (double th : {0.0, 0.7, 2.0, 4.0}) {
      const Vec3 x(kPi + std::cos(th), kPi + std::sin(th), 1.3);
      CHECK(sample(d.kappa, x, Interpolation::quintic) == doctest::Approx(1.0).epsilon(1e-4));
      CHECK(std::abs(sample(d.div_xi, x, Interpolation::quintic)) <= 1e-4);
      const Vec3 n = sample(d.normal, x, Interpolation::quintic);
      CHECK((n - Vec3(-std::cos(th), -std::sin(th), 0)).norm() <= 1e-3);
    }
    // The axis itself is outside the mask, and so is every stencil touching it.
    const int c = 32;
    CHECK_FALSE(d.valid[g.index(c, c, 5)]);
    CHECK_FALSE(d.valid[g.index(c + 4, c, 5)]);
    CHECK(d.valid[g.index(c + 5, c, 5)]);
  }

  TEST_CASE("direction derivatives agree with a refined oracle on ABC") {
    const VectorField3 w = curl(abc_field(64));
    const DirectionDerivatives d = direction_derivative_fields(unit_vorticity(w));
    const Vec3 x(0.1, 0.2, 0.3);
    auto xi = [](const Vec3& p) -> Vec3 { return abc_velocity(p).normalized(); };
    const double h = 1e-2;
    double div = 0.0;
    Vec3 bend = Vec3::Zero();
    const Vec3 t = xi(x);
    for (int a = 0; a < 3; ++a) {
      const Vec3 e = Vec3::Unit(a);
      const Vec3 dxi = d8(xi, x, e, h);
      div += dxi[a];
      bend += t[a] * dxi;
    }
    CHECK(std::abs(sample(d.div_xi, x, Interpolation::quintic) - div) <= 1e-6);
    CHECK(std::abs(sample(d.bend, x, Interpolation::quintic).norm() - bend.norm()) <= 1e-6);
    CHECK((sample(d.bend, x, Interpolation::quintic) - bend).norm() <= 1e-6);
  }

  TEST_CASE("trilinear sampling") {
    const Grid3 g = Grid3::cube(8, 8.0);
    const auto c = ScalarField3::from_function(g, [](const Vec3&) { return 3.25; });
    CHECK(sample(c, Vec3(0.37, 5.1, 7.9)) == doctest::Approx(3.25).epsilon(1e-15));
    const auto f = ScalarField3::from_function(g, [](const Vec3& x) { return x.x() * x.y() + 2.0 * x.z() - x.y(); });
    CHECK(sample(f, g.node(3, 4, 5)) == f(3, 4, 5));
    CHECK(sample(f, Vec3(3.5, 4.0, 5.0)) == doctest::Approx(0.5 * (f(3, 4, 5) + f(4, 4, 5))).epsilon(1e-15));
    // Exact for trilinear functions away from the periodic seam.
    const Vec3 p(2.3, 4.7, 1.9);
    CHECK(sample(f, p) == doctest::Approx(p.x() * p.y() + 2.0 * p.z() - p.y()).epsilon(1e-14));
    // Periodic wrap.
    CHECK(sample(f, p + Vec3(8.0, -16.0, 8.0)) == doctest::Approx(sample(f, p)).epsilon(1e-13));
  }

  TEST_CASE("Lagrange sampling reproduces polynomials of its degree") {
    const Grid3 g = Grid3::cube(16, 16.0);
    const auto f = ScalarField3::from_function(g, [](const Vec3& x) {
      return std::pow(x.x() - 7.0, 5) * 1e-3 + std::pow(x.y() - 8.0, 3) - x.z() * x.x();
    });
    const Vec3 p(7.3, 8.6, 6.2);
    const double exact = std::pow(p.x() - 7.0, 5) * 1e-3 + std::pow(p.y() - 8.0, 3) - p.z() * p.x();
    CHECK(sample(f, p, Interpolation::quintic) == doctest::Approx(exact).epsilon(1e-12));
  }

  TEST_CASE("generators") {
    const Vec3 u0 = abc_velocity(Vec3::Zero(), AbcFlow{1, 1, 1});
    CHECK((u0 - Vec3(1, 1, 1)).norm() <= 1e-15);
    CHECK(max_abs(divergence(gen_field(TaylorGreen{}, Grid3::cube(32)))) <= 1e-12);

    const VectorField3 u = gen_field(AntiparallelTubes{kPi, 0.3, 1.0}, Grid3::cube(32));
    CHECK(max_abs(divergence(u)) <= 1e-10);
    const VectorField3 w = curl(u);
    const double wmax = w.comp[2].maxCoeff(), wmin = w.comp[2].minCoeff();
    CHECK(wmax > 0.5);
    CHECK(wmin < -0.5);
    CHECK(wmax == doctest::Approx(-wmin).epsilon(1e-6));

    CHECK_THROWS_AS(gen_field(AntiparallelTubes{1.0, 0.6, 1.0}, Grid3::cube(16)), ConfigError);
    CHECK_THROWS_AS(gen_field(AntiparallelTubes{kPi, 0.3, 0.0}, Grid3::cube(16)), ConfigError);
    CHECK_THROWS_AS(gen_field(TaylorGreen{}, Grid3::cube(9)), ConfigError);

    const VectorField3 s = gen_field(ShearLayer{}, Grid3::cube(32));
    CHECK(max_abs(divergence(s)) <= 1e-12);
    const VectorField3 r1 = gen_field(RandomSolenoidal{42, -5.0 / 3.0}, Grid3::cube(16));
    const VectorField3 r2 = gen_field(RandomSolenoidal{42, -5.0 / 3.0}, Grid3::cube(16));
    const VectorField3 r3 = gen_field(RandomSolenoidal{43, -5.0 / 3.0}, Grid3::cube(16));
    CHECK(max_diff(r1, r2) == 0.0);
    CHECK(max_diff(r1, r3) > 0.1);
    CHECK(std::sqrt(2.0 * 0.5 * integrate(dot(r1, r1)) / std::pow(2 * kPi, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("velocity from vorticity inverts curl on mean-free fields") {
    const VectorField3 tg = tg_field(32);
    CHECK(max_diff(velocity_from_vorticity(curl(tg)), tg) <= 1e-12);
  }
}
