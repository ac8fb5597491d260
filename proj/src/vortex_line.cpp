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
#include "vld/vortex_line.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "vld/error.hpp"
#include "vld/format.hpp"

namespace vld {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::max_length:
      return "max_length";
    case Termination::left_valid_mask:
      return "left_valid_mask";
    case Termination::closed_loop:
      return "closed_loop";
  }
  return "unknown";
}

namespace {

// Travel direction at x, or false if the stencil leaves the mask.
bool travel_direction(const MaskedDirectionField& f, const Vec3& x, int direction, Interpolation scheme,
                      Vec3& out) {
  // Hand-built fields may lack spline coefficients; fall back to Lagrange.
  const bool spline = scheme == Interpolation::spline5 && f.xi_spline.comp[0].size() == f.xi.comp[0].size();
  if (scheme == Interpolation::spline5 && !spline) scheme = Interpolation::quintic;
  const Stencil st = make_stencil(f.xi.grid, x, scheme);
  if (!stencil_valid(f.xi.grid, st, spline ? f.spline_valid : f.valid)) return false;
  const Vec3 v = sample(spline ? f.xi_spline : f.xi, st);
  const double n = v.norm();
  if (!(n > 0.0)) return false;
  out = (direction / n) * v;
  return true;
}

struct RawTrace {
  std::vector<Vec3> points;
  Termination reason = Termination::max_length;
  bool loop_candidate = false;
  double loop_length = 0.0;
};

// Fixed-step RK4 for n_steps steps of size h. With detect_loop set, stops at
// the first return to the seed and reports an estimate of the loop length.
RawTrace integrate(const MaskedDirectionField& f, const Vec3& seed, long n_steps, double h, int direction,
                   Interpolation scheme, bool detect_loop) {
  RawTrace out;
  out.points.reserve(std::size_t(n_steps) + 1);
  out.points.push_back(seed);
  Vec3 t0;
  travel_direction(f, seed, direction, scheme, t0);
  const Grid3& g = f.xi.grid;
  Vec3 x = seed;
  for (long k = 1; k <= n_steps; ++k) {
    Vec3 k1, k2, k3, k4;
    if (!travel_direction(f, x, direction, scheme, k1) ||
        !travel_direction(f, x + 0.5 * h * k1, direction, scheme, k2) ||
        !travel_direction(f, x + 0.5 * h * k2, direction, scheme, k3) ||
        !travel_direction(f, x + h * k3, direction, scheme, k4)) {
      out.reason = Termination::left_valid_mask;
      return out;
    }
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Vec3 tk;
    if (!travel_direction(f, x, direction, scheme, tk)) {
      out.reason = Termination::left_valid_mask;
      return out;
    }
    out.points.push_back(x);
    if (detect_loop && k >= 8) {
      const Vec3 d = g.min_image(x, seed);  // from x to the seed
      if (d.norm() < 0.5 * h && tk.dot(t0) > 0.99) {
        out.loop_candidate = true;
        out.loop_length = k * h + d.dot(tk);
        return out;
      }
    }
  }
  return out;
}

}  // namespace

VortexLine trace_line(const MaskedDirectionField& xi, const Vec3& seed, double max_length, double step,
                      int direction, Interpolation scheme) {
  const Grid3& g = xi.xi.grid;
  if (!(max_length > 0.0) || !std::isfinite(max_length)) throw DomainError("trace_line: max_length must be > 0");
  if (!(step > 0.0)) throw DomainError("trace_line: step must be > 0");
  if (step > 0.5 * g.min_spacing() * (1.0 + 1e-12)) {
    throw DomainError("trace_line: step must not exceed half the grid spacing");
  }
  if (direction != 1 && direction != -1) throw DomainError("trace_line: direction must be +1 or -1");
  Vec3 t0;
  if (!travel_direction(xi, seed, direction, scheme, t0)) {
    throw NumericalError("trace_line: seed in irrotational region");
  }

  long n = long(std::ceil(max_length / step - 1e-9));
  n = std::max(n, 1L);
  double h = max_length / double(n);
  RawTrace raw = integrate(xi, seed, n, h, direction, scheme, true);

  if (raw.loop_candidate) {
    // Newton on the loop length: re-trace with a step that divides it
    // exactly and correct by the tangential miss at the end.
    double len = raw.loop_length;
    RawTrace loop;
    for (int it = 0; it < 6; ++it) {
      const long m = std::max(8L, long(std::lround(len / step)));
      const double hm = len / double(m);
      loop = integrate(xi, seed, m, hm, direction, scheme, false);
      if (loop.reason != Termination::max_length) break;
      Vec3 te;
      travel_direction(xi, loop.points.back(), direction, scheme, te);
      const double miss = g.min_image(loop.points.back(), seed).dot(te);
      len += miss;
      h = hm;
      if (std::abs(miss) < 1e-13 * std::max(1.0, len)) break;
    }
    if (loop.reason == Termination::max_length) {
      const long m = std::max(8L, long(std::lround(len / step)));
      h = len / double(m);
      raw = integrate(xi, seed, m, h, direction, scheme, false);
      raw.reason = Termination::closed_loop;
    } else {
      raw.reason = Termination::max_length;  // keep the original open trace
    }
  }

  VortexLine line;
  line.step = h;
  line.seed = seed;
  line.direction = direction;
  line.terminated_reason = raw.reason;
  line.samples.resize(raw.points.size());
  for (std::size_t k = 0; k < raw.points.size(); ++k) {
    line.samples[k].position = raw.points[k];
    line.samples[k].s = double(k) * h;
  }
  return line;
}

VortexLine trace_through(const MaskedDirectionField& xi, const Vec3& point, double length, double step,
                         Interpolation scheme) {
  VortexLine fwd = trace_line(xi, point, 0.5 * length, step, +1, scheme);
  if (fwd.terminated_reason == Termination::closed_loop) return fwd;
  VortexLine bwd = trace_line(xi, point, 0.5 * length, step, -1, scheme);
  if (bwd.terminated_reason == Termination::closed_loop) {
    bwd.terminated_reason = Termination::closed_loop;
  }
  VortexLine line;
  line.step = fwd.step;
  line.seed = point;
  line.direction = +1;
  line.terminated_reason = (fwd.terminated_reason == Termination::left_valid_mask ||
                            bwd.terminated_reason == Termination::left_valid_mask)
                               ? Termination::left_valid_mask
                               : Termination::max_length;
  for (std::size_t k = bwd.samples.size(); k-- > 1;) line.samples.push_back(bwd.samples[k]);
  for (const auto& s : fwd.samples) line.samples.push_back(s);
  for (std::size_t k = 0; k < line.samples.size(); ++k) line.samples[k].s = double(k) * line.step;
  return line;
}

FlowGeometry FlowGeometry::build(const VectorField3& omega, const VectorField3& u, double eps_rel,
                                 double kappa_floor) {
  require_same_grid(omega.grid, u.grid, "FlowGeometry");
  FlowGeometry geo;
  geo.u = u;
  geo.omega = omega;
  geo.omega_mag = magnitude(omega);
  geo.xi = unit_vorticity(omega, eps_rel);
  geo.deriv = direction_derivative_fields(geo.xi, kappa_floor);
  return geo;
}

LineSample probe(const FlowGeometry& geo, const Vec3& x, Interpolation scheme, bool* valid) {
  // Grid fields here are raw node values, so spline weights do not apply.
  if (scheme == Interpolation::spline5) scheme = Interpolation::quintic;
  const Grid3& g = geo.omega.grid;
  const Stencil st = make_stencil(g, x, scheme);
  LineSample out;
  out.position = x;
  if (valid) *valid = stencil_valid(g, st, geo.deriv.valid);
  out.omega_mag = sample(geo.omega_mag, st);
  const Vec3 xi = sample(geo.xi.xi, st);
  out.xi = xi.norm() > 0.0 ? Vec3(xi.normalized()) : Vec3::Zero();
  out.div_xi = sample(geo.deriv.div_xi, st);
  // The curvature vector is normal to xi; drop the tangential part the
  // interpolation leaves behind.
  Vec3 bend = sample(geo.deriv.bend, st);
  bend -= bend.dot(out.xi) * out.xi;
  out.kappa = bend.norm();
  out.normal = out.kappa >= geo.deriv.kappa_floor ? Vec3(bend / out.kappa) : Vec3::Zero();
  const Vec3 u = sample(geo.u, st);
  out.u_tan = u.dot(out.xi);
  out.u_norm = u.dot(out.normal);
  return out;
}

LineDiagnostics line_diagnostics(VortexLine& line, const FlowGeometry& geo, Interpolation scheme) {
  const std::size_t n = line.samples.size();
  std::vector<char> ok(n, 0);
  std::size_t anchor = 0;
  double best = HUGE_VAL;
  for (std::size_t k = 0; k < n; ++k) {
    bool v = false;
    LineSample s = probe(geo, line.samples[k].position, scheme, &v);
    ok[k] = v;
    s.s = line.samples[k].s;
    line.samples[k] = s;
    const double d = (s.position - line.seed).norm();
    if (d < best) best = d, anchor = k;
  }
  // Keep the valid run holding the seed, else the longest (first on ties).
  std::size_t lo = 0, hi = 0;
  if (n > 0 && ok[anchor]) {
    lo = hi = anchor;
    while (lo > 0 && ok[lo - 1]) --lo;
    while (hi + 1 < n && ok[hi + 1]) ++hi;
    ++hi;
  } else {
    for (std::size_t k = 0; k < n;) {
      if (!ok[k]) {
        ++k;
        continue;
      }
      std::size_t e = k;
      while (e < n && ok[e]) ++e;
      if (e - k > hi - lo) lo = k, hi = e;
      k = e;
    }
  }
  if (hi - lo < 2) throw NumericalError("line_diagnostics: fewer than two samples inside the valid region");
  if (hi - lo < n) {
    line.samples = std::vector<LineSample>(line.samples.begin() + std::ptrdiff_t(lo), line.samples.begin() + std::ptrdiff_t(hi));
    for (std::size_t k = 0; k < line.samples.size(); ++k) line.samples[k].s = double(k) * line.step;
    line.terminated_reason = Termination::left_valid_mask;
  }

  LineDiagnostics d;
  d.arc_length = line.length();
  std::vector<double> f(line.samples.size());
  double umin = line.samples[0].u_tan, umax = umin;
  for (std::size_t k = 0; k < line.samples.size(); ++k) {
    const LineSample& s = line.samples[k];
    d.max_omega = std::max(d.max_omega, s.omega_mag);
    d.M_line = std::max({d.M_line, std::abs(s.div_xi), s.kappa});
    d.U_n_line = std::max(d.U_n_line, std::abs(s.u_norm));
    umin = std::min(umin, s.u_tan);
    umax = std::max(umax, s.u_tan);
    f[k] = line.direction * s.div_xi;
  }
  d.U_xi_line = umax - umin;
  const CumulativeIntegral ci = cumulative_integral(f, line.step);
  d.div_integral = ci.signed_integral.back();
  d.abs_div_integral = ci.abs_integral.back();
  return d;
}

LineDiagnostics line_diagnostics(VortexLine& line, const VectorField3& omega, const VectorField3& u) {
  return line_diagnostics(line, FlowGeometry::build(omega, u));
}

CumulativeIntegral cumulative_integral(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  CumulativeIntegral out;
  out.signed_integral.assign(n, 0.0);
  out.abs_integral.assign(n, 0.0);
  if (n < 2) return out;
  std::vector<double> df(n);
  if (n == 2) {
    df[0] = df[1] = (f[1] - f[0]) / h;
  } else {
    df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    df[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for (std::size_t k = 1; k + 1 < n; ++k) df[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double piece = 0.5 * h * (f[k] + f[k + 1]) - h * h / 12.0 * (df[k + 1] - df[k]);
    out.signed_integral[k + 1] = out.signed_integral[k] + piece;
    out.abs_integral[k + 1] = out.abs_integral[k] + std::abs(piece);
  }
  return out;
}

LemmaOneReport check_lemma1(const VortexLine& line) {
  const std::size_t n = line.samples.size();
  if (n < 2) throw NumericalError("check_lemma1: line needs at least two samples");
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(line.samples[k].omega_mag > 0.0)) throw NumericalError("check_lemma1: line leaves N (|omega| <= 0 on the line)");
    f[k] = line.direction * line.samples[k].div_xi;
  }
  const CumulativeIntegral ci = cumulative_integral(f, line.step);
  LemmaOneReport r;
  r.div_integral = ci.signed_integral;
  r.abs_div_integral = ci.abs_integral;
  r.residual.resize(n);
  r.ratio.resize(n);
  r.predicted_ratio.resize(n);
  const double w0 = line.samples[0].omega_mag;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = line.samples[k].omega_mag;
    r.ratio[k] = wk / w0;
    r.predicted_ratio[k] = std::exp(-r.div_integral[k]);
    r.residual[k] = std::abs(wk - w0 * r.predicted_ratio[k]) / wk;
    r.max_rel_residual = std::max(r.max_rel_residual, r.residual[k]);
  }
  return r;
}

CorridorCheck ratio_corridor(const LemmaOneReport& report, double tau_factor) {
  CorridorCheck c;
  c.tau = tau_factor * report.max_rel_residual;
  c.worst_slack = HUGE_VAL;
  for (std::size_t k = 0; k < report.ratio.size(); ++k) {
    const double a = report.abs_div_integral[k];
    const double lr = std::log(report.ratio[k]);
    const double lo = -a + std::log1p(-std::min(c.tau, 0.5));
    const double hi = a + std::log1p(c.tau);
    const double slack = std::min(lr - lo, hi - lr);
    c.worst_slack = std::min(c.worst_slack, slack);
    if (slack < 0.0) c.holds = false;
  }
  return c;
}

MaxVorticity find_max_vorticity_point(const ScalarField3& m) {
  const Grid3& g = m.grid;
  MaxVorticity out;
  out.Omega = -HUGE_VAL;
  for (Index i = 0; i < g.size(); ++i) {
    if (m.data[i] > out.Omega) {
      out.Omega = m.data[i];
      out.flat_index = i;
    }
  }
  const auto c = g.coords(out.flat_index);
  out.point = g.node(out.flat_index);
  double peak = out.Omega;
  for (int a = 0; a < 3; ++a) {
    std::array<int, 3> lo = c, hi = c;
    lo[a] -= 1;
    hi[a] += 1;
    const double fm = m.data[g.wrapped_index(lo[0], lo[1], lo[2])];
    const double fp = m.data[g.wrapped_index(hi[0], hi[1], hi[2])];
    const double curv = fm - 2.0 * out.Omega + fp;
    if (curv < 0.0) {
      const double off = 0.5 * (fm - fp) / curv;
      if (std::abs(off) <= 1.0) {
        out.point[a] += off * g.h(a);
        peak += -0.125 * (fp - fm) * (fp - fm) / curv;
      }
    }
  }
  out.Omega = std::max(out.Omega, peak);
  return out;
}

MaxVorticity find_max_vorticity_point(const VectorField3& omega) {
  return find_max_vorticity_point(magnitude(omega));
}

void write_line_csv(std::ostream& os, const VortexLine& line) {
  os << "s,x,y,z,omega_mag,div_xi,kappa,u_tan,u_norm\n";
  for (const auto& s : line.samples) {
    os << fmt17(s.s) << ',' << fmt17(s.position.x()) << ',' << fmt17(s.position.y()) << ','
       << fmt17(s.position.z()) << ',' << fmt17(s.omega_mag) << ',' << fmt17(s.div_xi) << ','
       << fmt17(s.kappa) << ',' << fmt17(s.u_tan) << ',' << fmt17(s.u_norm) << '\n';
  }
}

}  // namespace vld
