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

#include <functional>
#include <optional>
#include <vector>

#include "vld/diagnostics.hpp"
#include "vld/interp.hpp"
#include "vld/spectral.hpp"
#include "vld/vortex_line.hpp"

namespace vld {

// ---------------------------------------------------------------------------
// Pseudo-spectral stepper.

/// Velocity state in spectral form. Every retained mode is divergence-free
/// and outside the 2/3 band the coefficients are zero.
struct SimState {
  double t = 0.0;
  SpectralVector u_hat;
  Grid3 grid;

  /// Projects and dealiases `u`; throws ConfigError on a bad grid.
  static SimState from_velocity(const VectorField3& u, double t = 0.0);
  VectorField3 velocity() const;
  VectorField3 vorticity() const;
  const Mask& dealias_mask() const;
};

struct SolverOptions {
  double cfl = 0.5;
  /// Optional exponential filter exp(-36 (|k|/k_max)^36); off by default.
  bool spectral_filter = false;
};

/// Largest dt allowed by the CFL guard for the current velocity.
double max_stable_dt(const SimState& s, double cfl = 0.5);

/// One RK4 step of u_t = P[u x omega] (rotational form, pressure absorbed
/// by the Leray projection) with projection and dealiasing at every stage.
/// Throws NumericalError with a suggested dt when the CFL guard fails.
SimState step(const SimState& s, double dt, const SolverOptions& opt = {});

/// max over modes of |k . u_hat(k)| / |k|, relative to max |u_hat|.
double spectral_divergence(const SimState& s);

/// E = 1/2 int |u|^2.
double energy(const VectorField3& u);
/// H = int u . omega.
double helicity(const VectorField3& u, const VectorField3& omega);

// ---------------------------------------------------------------------------
// Lagrangian particles.

using VelocityProvider = std::function<Vec3(const Vec3& x, double t)>;

/// Velocity from stored snapshots: spatial Lagrange interpolation and linear
/// interpolation in time (clamped outside [times.front(), times.back()]).
VelocityProvider snapshot_provider(std::vector<double> times, std::vector<VectorField3> fields,
                                   Interpolation scheme = Interpolation::quintic);

/// One classical RK4 step of dX/dt = u(X, t).
Vec3 rk4_particle_step(const VelocityProvider& u, const Vec3& x, double t, double dt);

struct Trajectories {
  std::vector<double> times;
  std::vector<std::vector<Vec3>> positions;  // positions[time][particle]
};

/// Integrates every point from t1 to t2 with the step shrunk to divide the
/// interval evenly. Positions are not wrapped.
Trajectories advect_particles(const VelocityProvider& u, const std::vector<Vec3>& points, double t1, double t2,
                              double dt);

// ---------------------------------------------------------------------------
// Material lines.

struct MaterialLine {
  std::vector<Vec3> alpha_points;    // positions at t1
  std::vector<Vec3> current_points;  // positions at t
  double t1 = 0.0;
  double t = 0.0;
  std::vector<double> beta;  // cumulative chord length at t1
  bool spacing_warning = false;

  double length() const;
  double length_t1() const { return beta.empty() ? 0.0 : beta.back(); }
};

inline constexpr int kDefaultMarkers = 129;

/// Markers placed with uniform arc-length spacing along the vortex line
/// traced from `seed` (direction +1) for `length`.
MaterialLine seed_material_line(const MaskedDirectionField& xi, const Vec3& seed, double length,
                                int markers = kDefaultMarkers, double t1 = 0.0);
/// Markers at given positions (e.g. a straight vortex line).
MaterialLine material_line_from_points(std::vector<Vec3> points, double t1 = 0.0);

/// Advects the markers from line.t to t2. Sets spacing_warning when a
/// marker gap grows beyond 10x the initial gap.
MaterialLine track_material_line(const MaterialLine& line, const VelocityProvider& u, double t2, double dt);

/// ds/dbeta at each marker: |dX_t/dj| / |dX_t1/dj| with 4th-order
/// differences in the marker index j (5 or more markers), else 3-point
/// differences of the current polyline arc length with respect to beta.
std::vector<double> arc_length_stretching(const MaterialLine& line);

struct LemmaTwoReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> residual;  // NaN at excluded markers
  std::vector<double> s_beta;
  std::vector<double> omega_ratio;
  std::vector<int> excluded;
};

/// Residual |s_beta - |w(X, t)| / |w(alpha, t1)|| / s_beta per marker, with
/// |w| interpolated from the two grid snapshots.
LemmaTwoReport check_lemma2(const MaterialLine& line, const VectorField3& omega_t1, const VectorField3& omega_t,
                            Interpolation scheme = Interpolation::quintic);

/// Geometry and flow measured on the markers at one time.
struct MaterialLineStats {
  double t = 0.0;
  double l = 0.0;
  double M = 0.0;
  double U_xi = 0.0;  // max - min of u . xi over markers
  double U_n = 0.0;   // max |u . n|
  double Omega_l = 0.0;
  std::vector<double> omega_mag;
};

MaterialLineStats measure_material_line(const MaterialLine& line, const FlowGeometry& geo,
                                        Interpolation scheme = Interpolation::quintic);

struct StretchingRow {
  double t = 0.0;
  double l_ratio = 0.0;       // l(t) / l(t1)
  double exponent = 0.0;      // M(t) l(t) + M(t1) l(t1)
  double omega_margin = 0.0;  // worst relative slack of the two-sided ratio bound
  double length_lhs = 0.0, length_rhs = 0.0;  // l(t) <= l(t1) + int (U_xi + M U_n l)
  double growth_lhs = 0.0, growth_rhs = 0.0;  // Omega_l(t) <= e^{...} Omega_l(t1) [1 + int(...)/l(t1)]
  double identity_residual = 0.0;             // max_j |l_ratio - ratio_j| / l_ratio
};

struct StretchingReport {
  bool holds = true;
  double tolerance = 1e-2;
  double worst_omega_margin = 0.0;
  double worst_length_margin = 0.0;
  double worst_growth_margin = 0.0;
  double max_identity_residual = 0.0;  // meaningful when M = 0 throughout
  std::vector<StretchingRow> rows;
};

/// Evaluates the two-sided length/vorticity-ratio bound on every marker and
/// the growth bound for Omega_l at every recorded time after the first. The
/// constant in the growth bound is 1, as it follows from the length bound
/// with |(u.xi)(end) - (u.xi)(start)| <= U_xi. Time integrals are trapezoids
/// over the recorded times. Margins are relative; a bound holds when its
/// margin is >= -tolerance.
StretchingReport check_stretching_inequalities(const std::vector<MaterialLineStats>& history,
                                               double tolerance = 1e-2);

/// Circulation of u around a closed marker polygon (trapezoid per edge).
double circulation(const std::vector<Vec3>& loop, const VectorField3& u,
                   Interpolation scheme = Interpolation::quintic);

// ---------------------------------------------------------------------------
// Runs with diagnostics.

enum class SeedPolicy { through_argmax, length_fraction, lagrangian };

struct RunOptions {
  double t_end = 1.0;
  double dt = 1e-3;
  int every = 10;
  SeedPolicy seed_policy = SeedPolicy::through_argmax;
  double line_length = 1.0;      // through_argmax and lagrangian
  double length_fraction = 0.25; // of lx, for length_fraction
  SolverOptions solver;
  /// Material line seeded through this point at t = 0 and co-advected.
  std::optional<Vec3> material_seed;
  double material_length = 1.0;
  int material_markers = kDefaultMarkers;
};

/// Everything available at a diagnostic step.
struct DiagnosticFrame {
  int index = 0;
  double t = 0.0;
  const VectorField3& u;
  const VectorField3& omega;
  const FlowGeometry& geometry;
  const VortexLine& line;
  const MaterialLine* material = nullptr;
};

struct RunResult {
  DiagnosticsTimeline timeline;
  std::vector<VortexLine> lines;                  // one per diagnostic row
  std::vector<MaterialLineStats> material_stats;  // per row, if tracked
  std::optional<MaterialLine> material;           // final state
  SimState final_state;
  double max_spectral_divergence = 0.0;           // over every step
};

/// Steps `initial` to t_end. Every `every` steps (and at t = 0 and t_end)
/// it records a timeline row from the vortex line selected by the seed
/// policy and calls `on_frame`. The number of steps is ceil(t_end / dt)
/// with dt shrunk to divide t_end evenly.
RunResult run_with_diagnostics(const VectorField3& initial, const RunOptions& opt,
                               const std::function<void(const DiagnosticFrame&)>& on_frame = {});

}  // namespace vld
