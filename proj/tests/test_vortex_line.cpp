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
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "vld/error.hpp"
#include "vld/vortex_line.hpp"

using namespace vld;
using namespace vld::testing;

namespace {

VortexLine annotated(const VectorField3& omega, const Vec3& seed, double length, int direction = 1) {
  const FlowGeometry geo = FlowGeometry::build(omega, velocity_from_vorticity(omega));
  VortexLine line = trace_line(geo.xi, seed, length, default_step(omega.grid), direction);
  line_diagnostics(line, geo);
  return line;
}

double lemma1_residual(const VectorField3& omega, const Vec3& seed, double length) {
  return check_lemma1(annotated(omega, seed, length)).max_rel_residual;
}

}  // namespace

TEST_SUITE("vortex_line") {
  TEST_CASE("straight line") {
    const Grid3 g = Grid3::cube(16);
    const auto w = VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 1); });
    const MaskedDirectionField xi = unit_vorticity(w);
    const VortexLine line = trace_line(xi, Vec3::Zero(), 1.0, default_step(g));
    CHECK(line.terminated_reason == Termination::max_length);
    CHECK((line.samples.back().position - Vec3(0, 0, 1)).norm() <= 1e-12);
    CHECK(line.samples.front().s == 0.0);
    CHECK(line.length() == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t k = 1; k < line.samples.size(); ++k) {
      CHECK(line.samples[k].s > line.samples[k - 1].s);
      const double gap = (line.samples[k].position - line.samples[k - 1].position).norm();
      CHECK(std::abs(gap - line.step) <= 0.1 * line.step);
    }
  }

  TEST_CASE("preconditions") {
    const Grid3 g = Grid3::cube(16);
    const auto w = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(0, 0, std::sin(x.x())); });
    const MaskedDirectionField xi = unit_vorticity(w);
    CHECK_THROWS_WITH_AS(trace_line(xi, Vec3(0.0, 1.0, 1.0), 1.0, default_step(g)),
                         doctest::Contains("seed in irrotational region"), NumericalError);
    CHECK_THROWS_AS(trace_line(xi, Vec3(1.0, 1.0, 1.0), 1.0, g.min_spacing()), DomainError);
    CHECK_THROWS_AS(trace_line(xi, Vec3(1.0, 1.0, 1.0), 1.0, default_step(g), 0), DomainError);
    CHECK_THROWS_AS(trace_line(xi, Vec3(1.0, 1.0, 1.0), -1.0, default_step(g)), DomainError);
  }

  TEST_CASE("leaving the valid mask terminates the line") {
    // omega = (sin y, 0, 0) near y = 0 has lines along x; bend them into
    // the zero plane with a small z-independent tilt.
    const Grid3 g = Grid3::cube(32);
    const auto w = VectorField3::from_function(g, [](const Vec3& x) {
      return Vec3(std::cos(x.x()) * std::sin(x.y()), -std::sin(x.x()) * std::cos(x.y()), 0.0);
    });
    const MaskedDirectionField xi = unit_vorticity(w);
    // Lines of this field are level sets of sin x sin y; they pass through
    // the stagnation point region only at the corners, so a long line along
    // a separatrix-adjacent path must stop at the mask or close.
    const VortexLine line = trace_line(xi, Vec3(0.02, 1.5, 0.0), 40.0, default_step(g));
    CHECK(line.terminated_reason != Termination::max_length);
  }

  TEST_CASE("circle closes after 2 pi") {
    const VectorField3 w = azimuthal_field(64);
    const MaskedDirectionField xi = unit_vorticity(w);
    const VortexLine line = trace_line(xi, Vec3(kPi + 1.0, kPi, 1.0), 10.0, default_step(w.grid));
    CHECK(line.terminated_reason == Termination::closed_loop);
    CHECK(line.length() == doctest::Approx(2.0 * kPi).epsilon(1e-6 / (2 * kPi)));
    CHECK(std::abs(line.length() - 2.0 * kPi) <= 1e-6);
  }

  TEST_CASE("RK4 self-convergence on ABC") {
    const VectorField3 w = curl(abc_field(64));
    const MaskedDirectionField xi = unit_vorticity(w);
    const Vec3 seed(0.1, 0.2, 0.3);
    const double h = 0.5 * w.grid.min_spacing();
    const Vec3 a = trace_line(xi, seed, 1.0, h).samples.back().position;
    const Vec3 b = trace_line(xi, seed, 1.0, h / 2).samples.back().position;
    const Vec3 c = trace_line(xi, seed, 1.0, h / 4).samples.back().position;
    const double order = std::log2((a - b).norm() / (b - c).norm());
    MESSAGE("observed order ", order, " diffs ", (a - b).norm(), " ", (b - c).norm());
    CHECK(order >= 3.8);
  }

  TEST_CASE("unit speed along the traced curve") {
    const VectorField3 w = curl(abc_field(64));
    const MaskedDirectionField xi = unit_vorticity(w);
    const VortexLine line = trace_line(xi, Vec3(0.1, 0.2, 0.3), 2.0, default_step(w.grid));
    const auto& s = line.samples;
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < s.size(); ++k) {
      const Vec3 d = (-s[k + 2].position + 8.0 * s[k + 1].position - 8.0 * s[k - 1].position + s[k - 2].position) /
                     (12.0 * line.step);
      worst = std::max(worst, std::abs(d.norm() - 1.0));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("reverse tracing returns to the seed") {
    const VectorField3 w = curl(abc_field(64));
    const MaskedDirectionField xi = unit_vorticity(w);
    const Vec3 seed(0.1, 0.2, 0.3);
    const double L = 1.5;
    const VortexLine fwd = trace_line(xi, seed, L, default_step(w.grid), 1);
    const VortexLine back = trace_line(xi, fwd.samples.back().position, L, default_step(w.grid), -1);
    CHECK((back.samples.back().position - seed).norm() <= 1e-6 * L);
  }

  TEST_CASE("trace_through centres the line on the point") {
    const VectorField3 w = curl(abc_field(32));
    const MaskedDirectionField xi = unit_vorticity(w);
    const Vec3 p(1.0, 2.0, 3.0);
    const VortexLine line = trace_through(xi, p, 1.0, default_step(w.grid));
    const std::size_t mid = line.samples.size() / 2;
    CHECK(line.samples.size() % 2 == 1);
    CHECK((line.samples[mid].position - p).norm() == 0.0);
    CHECK(line.length() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(line.direction == 1);
    // Orientation: the tangent at the centre follows xi.
    const Vec3 t = (line.samples[mid + 1].position - line.samples[mid - 1].position).normalized();
    CHECK(t.dot(abc_velocity(p).normalized()) > 0.99);
  }

  TEST_CASE("line diagnostics: straight lines with constant magnitude") {
    const Grid3 g = Grid3::cube(32);
    const auto w = VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 3); });
    VortexLine line = trace_line(unit_vorticity(w), Vec3(1, 1, 1), 2.0, default_step(g));
    const LineDiagnostics d = line_diagnostics(line, w, VectorField3(g));
    CHECK(d.div_integral == 0.0);
    CHECK(d.M_line == 0.0);
    CHECK(d.max_omega == doctest::Approx(3.0));
    CHECK(d.arc_length == doctest::Approx(2.0));
  }

  TEST_CASE("line diagnostics: ring curvature") {
    const VectorField3 w = azimuthal_field(64);
    const FlowGeometry geo = FlowGeometry::build(w, VectorField3(w.grid));
    VortexLine line = trace_line(geo.xi, Vec3(kPi + 1.0, kPi, 1.0), 10.0, default_step(w.grid));
    line_diagnostics(line, geo);
    for (const auto& s : line.samples) {
      CHECK(s.kappa == doctest::Approx(1.0).epsilon(1e-3));
      CHECK(std::abs(s.xi.norm() - 1.0) <= 1e-10);
      CHECK(s.kappa >= 0.0);
    }
  }

  TEST_CASE("line diagnostics: flow along the lines has no normal velocity") {
    const VectorField3 w = curl(abc_field(64));
    const MaskedDirectionField xi = unit_vorticity(w);
    VortexLine line = trace_line(xi, Vec3(0.1, 0.2, 0.3), 2.0, default_step(w.grid));
    const LineDiagnostics d = line_diagnostics(line, w, xi.xi);
    CHECK(d.U_n_line <= 1e-10);
    CHECK(std::abs(d.div_integral) <= d.abs_div_integral);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& s : line.samples) {
      lo = std::min(lo, s.u_tan);
      hi = std::max(hi, s.u_tan);
    }
    CHECK(d.U_xi_line == doctest::Approx(hi - lo));
  }

  TEST_CASE("line diagnostics need two samples") {
    const Grid3 g = Grid3::cube(16);
    const auto w = VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 1); });
    VortexLine line;
    line.step = 0.1;
    line.samples.resize(1);
    CHECK_THROWS_AS(line_diagnostics(line, w, VectorField3(g)), NumericalError);
  }

  TEST_CASE("cumulative integral is 4th order and bounds its signed part") {
    auto run = [](int n) {
      std::vector<double> f(std::size_t(n) + 1);
      const double h = 2.0 / n;
      for (int k = 0; k <= n; ++k) f[std::size_t(k)] = std::exp(std::sin(3.0 * k * h));
      return cumulative_integral(f, h);
    };
    // Reference by a fine run.
    const double ref = run(4096).signed_integral.back();
    const double e1 = std::abs(run(32).signed_integral.back() - ref);
    const double e2 = std::abs(run(64).signed_integral.back() - ref);
    CHECK(std::log2(e1 / e2) >= 3.7);
    const auto ci = run(40);
    for (std::size_t k = 0; k < ci.signed_integral.size(); ++k) {
      CHECK(std::abs(ci.signed_integral[k]) <= ci.abs_integral[k]);
    }
    const double cubic_h = 0.1;
    std::vector<double> cubic;
    for (int k = 0; k <= 10; ++k) cubic.push_back(std::pow(k * cubic_h, 2));
    CHECK(cumulative_integral(cubic, cubic_h).signed_integral.back() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("magnitude identity: straight lines") {
    const Grid3 g = Grid3::cube(32);
    const auto w = VectorField3::from_function(g, [](const Vec3& x) {
      return Vec3(0, 0, 2.0 + std::sin(x.x()) * std::cos(x.y()));
    });
    CHECK(lemma1_residual(w, Vec3(0.4, 0.9, 0.1), 2.0) <= 1e-10);
  }

  TEST_CASE("magnitude identity on omega = (1, 0, sin x)") {
    for (double scale : {1.0, 7.5}) {
      const double r = lemma1_residual(sinx_vorticity(64, scale), Vec3(0.3, 0.5, 0.7), 2.0);
      MESSAGE("residual ", r);
      CHECK(r <= 1e-5);
    }
  }

  TEST_CASE("magnitude identity on ABC converges under refinement") {
    const Vec3 seed(0.1, 0.2, 0.3);
    const double r64 = lemma1_residual(curl(abc_field(64)), seed, 1.0);
    const double r128 = lemma1_residual(curl(abc_field(128)), seed, 1.0);
    MESSAGE("residuals ", r64, " ", r128);
    CHECK(r64 <= 1e-5);
    CHECK(r64 / r128 >= 4.0);
  }

  TEST_CASE("magnitude identity refuses lines leaving the vorticity support") {
    VortexLine line;
    line.step = 0.1;
    line.samples.resize(3);
    line.samples[0].omega_mag = 1.0;
    line.samples[1].omega_mag = 0.0;
    line.samples[2].omega_mag = 1.0;
    CHECK_THROWS_WITH_AS(check_lemma1(line), doctest::Contains("leaves N"), NumericalError);
  }

  TEST_CASE("ratio corridor holds on traced lines") {
    const VortexLine line = annotated(curl(abc_field(64)), Vec3(0.1, 0.2, 0.3), 3.0);
    const LemmaOneReport rep = check_lemma1(line);
    const CorridorCheck c = ratio_corridor(rep);
    CHECK(c.holds);
    CHECK(c.worst_slack >= 0.0);
    // A corridor with tau = 0 and A forced to zero must fail for a varying |omega|.
    LemmaOneReport squeezed = rep;
    for (auto& a : squeezed.abs_div_integral) a = 0.0;
    squeezed.max_rel_residual = 0.0;
    CHECK_FALSE(ratio_corridor(squeezed).holds);
  }

  TEST_CASE("maximum vorticity") {
    const Grid3 g = Grid3::cube(32);
    const auto w = VectorField3::from_function(g, [](const Vec3& x) { return Vec3(0, 0, std::cos(x.x())); });
    const MaxVorticity m = find_max_vorticity_point(w);
    CHECK(m.Omega == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.flat_index == 0);
    CHECK(std::abs(m.point.x()) <= 1e-12);

    const Vec3 c(3.05, 2.93, 0.0);
    const double sigma = 0.3;
    const auto tube = VectorField3::from_function(Grid3::cube(64), [&](const Vec3& x) {
      const double r2 = std::pow(x.x() - c.x(), 2) + std::pow(x.y() - c.y(), 2);
      return Vec3(0, 0, 5.0 * std::exp(-r2 / (2 * sigma * sigma)));
    });
    const MaxVorticity mt = find_max_vorticity_point(tube);
    CHECK(mt.Omega == doctest::Approx(5.0).epsilon(1e-3 / 5.0));
    CHECK(std::abs(mt.point.x() - c.x()) <= 0.02);

    ScalarField3 two(g);
    two.data[g.index(3, 4, 5)] = 2.0;
    two.data[g.index(1, 4, 6)] = 2.0;
    CHECK(find_max_vorticity_point(two).flat_index == g.index(3, 4, 5));
  }

  TEST_CASE("line CSV") {
    const Grid3 g = Grid3::cube(16);
    const auto w = VectorField3::from_function(g, [](const Vec3&) { return Vec3(0, 0, 1); });
    VortexLine line = trace_line(unit_vorticity(w), Vec3(1, 1, 1), 0.5, default_step(g));
    line_diagnostics(line, w, VectorField3(g));
    std::ostringstream os;
    write_line_csv(os, line);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "s,x,y,z,omega_mag,div_xi,kappa,u_tan,u_norm");
    int rows = 0;
    for (std::string l; std::getline(is, l);) ++rows;
    CHECK(rows == int(line.samples.size()));
  }
}
