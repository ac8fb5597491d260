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

#include <iosfwd>
#include <span>
#include <vector>

#include "vld/fields.hpp"
#include "vld/interp.hpp"

namespace vld {

enum class Termination { max_length, left_valid_mask, closed_loop };
const char* to_string(Termination t);

struct LineSample {
  Vec3 position = Vec3::Zero();
  double s = 0.0;
  double omega_mag = 0.0;
  Vec3 xi = Vec3::Zero();  // vorticity direction (not the travel direction)
  double div_xi = 0.0;
  double kappa = 0.0;
  Vec3 normal = Vec3::Zero();
  double u_tan = 0.0;   // u . xi
  double u_norm = 0.0;  // u . n
};

/// Arc-length parameterized polyline along an integral curve of xi.
/// Samples are uniformly spaced: s_k = k * step. `direction` is +1 when s
/// increases along xi and -1 when the line was traced against xi.
struct VortexLine {
  std::vector<LineSample> samples;
  double step = 0.0;
  Vec3 seed = Vec3::Zero();
  int direction = 1;
  Termination terminated_reason = Termination::max_length;

  double length() const { return samples.empty() ? 0.0 : samples.back().s; }
};

/// Default arc-length step: a quarter of the smallest grid spacing.
inline double default_step(const Grid3& g) { return 0.25 * g.min_spacing(); }

/// RK4 integration of dX/ds = direction * xi(X) with xi renormalized at
/// every stage. The step is shrunk to max_length / ceil(max_length / step)
/// so the last sample lands on max_length. Stops early when the
/// interpolation stencil leaves the valid mask, or when the curve returns
/// within step/2 of the seed with an aligned tangent; a closed loop is then
/// re-traced with the step fitted to the loop length.
VortexLine trace_line(const MaskedDirectionField& xi, const Vec3& seed, double max_length, double step,
                      int direction = 1, Interpolation scheme = Interpolation::spline5);

/// Line of total length `length` centred on `point`, oriented along xi.
VortexLine trace_through(const MaskedDirectionField& xi, const Vec3& point, double length, double step,
                         Interpolation scheme = Interpolation::spline5);

/// Grid fields needed to annotate lines, computed once per flow snapshot.
struct FlowGeometry {
  VectorField3 u;
  VectorField3 omega;
  ScalarField3 omega_mag;
  MaskedDirectionField xi;
  DirectionDerivatives deriv;

  static FlowGeometry build(const VectorField3& omega, const VectorField3& u, double eps_rel = kDefaultEpsRel,
                            double kappa_floor = kDefaultKappaFloor);
};

/// Per-sample quantities at arbitrary points (used for material markers).
LineSample probe(const FlowGeometry& geo, const Vec3& x, Interpolation scheme = Interpolation::quintic,
                 bool* valid = nullptr);

struct LineDiagnostics {
  double arc_length = 0.0;
  double max_omega = 0.0;
  double M_line = 0.0;
  double div_integral = 0.0;      // signed, oriented along the traversal
  double abs_div_integral = 0.0;  // >= |div_integral|
  double U_xi_line = 0.0;
  double U_n_line = 0.0;
};

/// Fills the per-sample quantities of `line` by interpolating the grid
/// fields of `geo` and reduces them. Samples whose stencil touches an
/// invalid derivative cell are dropped: the line keeps the contiguous valid
/// run holding the seed (or the longest run) with s restarted at 0.
LineDiagnostics line_diagnostics(VortexLine& line, const FlowGeometry& geo,
                                 Interpolation scheme = Interpolation::quintic);
LineDiagnostics line_diagnostics(VortexLine& line, const VectorField3& omega, const VectorField3& u);

/// Cumulative integrals over uniformly spaced samples. `signed_integral` is
/// the composite trapezoid with Euler-Maclaurin end correction (4th order);
/// `abs_integral` sums the magnitudes of the same per-interval pieces.
struct CumulativeIntegral {
  std::vector<double> signed_integral;
  std::vector<double> abs_integral;
};
CumulativeIntegral cumulative_integral(std::span<const double> f, double h);

/// Magnitude/divergence identity along one annotated line:
/// residual_k = | |w(s_k)| - |w(s_0)| exp(-int_0^{s_k} div xi ds) | / |w(s_k)|.
struct LemmaOneReport {
  double max_rel_residual = 0.0;
  std::vector<double> residual;
  std::vector<double> ratio;            // |w(s_k)| / |w(s_0)|
  std::vector<double> predicted_ratio;  // exp(-int div xi ds)
  std::vector<double> div_integral;
  std::vector<double> abs_div_integral;
};
LemmaOneReport check_lemma1(const VortexLine& line);

/// Every ratio must sit in [e^{-A_k}(1 - tau), e^{A_k}(1 + tau)] with
/// A_k the absolute integral up to s_k and tau = tau_factor * residual.
struct CorridorCheck {
  bool holds = true;
  double tau = 0.0;
  double worst_slack = 0.0;  // min over samples of the log-distance to the corridor edge
};
CorridorCheck ratio_corridor(const LemmaOneReport& report, double tau_factor = 10.0);

struct MaxVorticity {
  Vec3 point = Vec3::Zero();
  double Omega = 0.0;
  Index flat_index = 0;
};
/// Grid argmax of |w| (smallest flat index on ties) refined by a 3-point
/// parabola along each axis.
MaxVorticity find_max_vorticity_point(const VectorField3& omega);
MaxVorticity find_max_vorticity_point(const ScalarField3& omega_mag);

/// CSV dump: s,x,y,z,omega_mag,div_xi,kappa,u_tan,u_norm (17 significant digits).
void write_line_csv(std::ostream& os, const VortexLine& line);

}  // namespace vld
