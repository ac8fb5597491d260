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
#include "vld/euler.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "vld/error.hpp"
#include "vld/format.hpp"

namespace vld {

namespace {

void axpy(SpectralVector& y, double a, const SpectralVector& x) {
  for (int c = 0; c < 3; ++c) y[c] += a * x[c];
}

SpectralVector combine(const SpectralVector& a, double b, const SpectralVector& x) {
  SpectralVector out = a;
  axpy(out, b, x);
  return out;
}

// P[u x omega] restricted to the 2/3 band; also reports max |u|.
SpectralVector rhs(const SpectralOps& ops, const SpectralVector& u_hat, double* umax) {
  const VectorField3 u = ops.inverse(u_hat);
  const VectorField3 w = ops.inverse(ops.curl(u_hat));
  VectorField3 cross(u.grid);
  cross.comp[0] = u.comp[1] * w.comp[2] - u.comp[2] * w.comp[1];
  cross.comp[1] = u.comp[2] * w.comp[0] - u.comp[0] * w.comp[2];
  cross.comp[2] = u.comp[0] * w.comp[1] - u.comp[1] * w.comp[0];
  if (umax) *umax = max_norm(u);
  SpectralVector out = ops.forward(cross);
  ops.apply_dealias(out);
  ops.project(out);
  return out;
}

void apply_filter(const SpectralOps& ops, SpectralVector& v) {
  const Grid3& g = ops.grid();
  for (Index i = 0; i < ops.spectral_size(); ++i) {
    const auto m = ops.mode(i);
    double q = 0.0;
    for (int a = 0; a < 3; ++a) q += std::pow(std::abs(m[a]) / (0.5 * g.n(a)), 36.0);
    const double f = std::exp(-36.0 * q);
    for (int c = 0; c < 3; ++c) v[c][i] *= f;
  }
}

}  // namespace

SimState SimState::from_velocity(const VectorField3& u, double t) {
  u.grid.validate();
  const auto ops = SpectralOps::for_grid(u.grid);
  SimState s;
  s.t = t;
  s.grid = u.grid;
  s.u_hat = ops->forward(u);
  ops->apply_dealias(s.u_hat);
  ops->project(s.u_hat);
  return s;
}

VectorField3 SimState::velocity() const { return SpectralOps::for_grid(grid)->inverse(u_hat); }

VectorField3 SimState::vorticity() const {
  const auto ops = SpectralOps::for_grid(grid);
  return ops->inverse(ops->curl(u_hat));
}

const Mask& SimState::dealias_mask() const { return SpectralOps::for_grid(grid)->dealias_mask(); }

double max_stable_dt(const SimState& s, double cfl) {
  const double umax = max_norm(s.velocity());
  return umax > 0.0 ? cfl * s.grid.min_spacing() / umax : HUGE_VAL;
}

SimState step(const SimState& s, double dt, const SolverOptions& opt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be > 0");
  const auto ops = SpectralOps::for_grid(s.grid);
  double umax = 0.0;
  const SpectralVector k1 = rhs(*ops, s.u_hat, &umax);
  if (umax > 0.0) {
    const double limit = opt.cfl * s.grid.min_spacing() / umax;
    if (dt > limit * (1.0 + 1e-12)) {
      throw NumericalError("CFL violated: dt = " + fmt17(dt) + " exceeds " + fmt17(limit) +
                           "; suggested dt = " + fmt17(0.9 * limit));
    }
  }
  const SpectralVector k2 = rhs(*ops, combine(s.u_hat, 0.5 * dt, k1), nullptr);
  const SpectralVector k3 = rhs(*ops, combine(s.u_hat, 0.5 * dt, k2), nullptr);
  const SpectralVector k4 = rhs(*ops, combine(s.u_hat, dt, k3), nullptr);
  SimState out = s;
  out.t = s.t + dt;
  axpy(out.u_hat, dt / 6.0, k1);
  axpy(out.u_hat, dt / 3.0, k2);
  axpy(out.u_hat, dt / 3.0, k3);
  axpy(out.u_hat, dt / 6.0, k4);
  ops->project(out.u_hat);
  if (opt.spectral_filter) apply_filter(*ops, out.u_hat);
  return out;
}

double spectral_divergence(const SimState& s) {
  const auto ops = SpectralOps::for_grid(s.grid);
  double umax = 0.0, dmax = 0.0;
  for (Index i = 0; i < ops->spectral_size(); ++i) {
    for (int c = 0; c < 3; ++c) umax = std::max(umax, std::abs(s.u_hat[c][i]));
    const double k2 = ops->k2()[i];
    if (k2 == 0.0) continue;
    const Complex d = ops->kx()[i] * s.u_hat[0][i] + ops->ky()[i] * s.u_hat[1][i] + ops->kz()[i] * s.u_hat[2][i];
    dmax = std::max(dmax, std::abs(d) / std::sqrt(k2));
  }
  return umax > 0.0 ? dmax / umax : 0.0;
}

double energy(const VectorField3& u) {
  ScalarField3 e(u.grid);
  e.data = u.comp[0].square() + u.comp[1].square() + u.comp[2].square();
  return 0.5 * integrate(e);
}

double helicity(const VectorField3& u, const VectorField3& omega) { return integrate(dot(u, omega)); }

VelocityProvider snapshot_provider(std::vector<double> times, std::vector<VectorField3> fields,
                                   Interpolation scheme) {
  if (times.empty() || times.size() != fields.size()) {
    throw ConfigError("snapshot_provider: need one field per time");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ConfigError("snapshot_provider: times must increase");
    require_same_grid(fields[0].grid, fields[k].grid, "snapshot_provider");
  }
  struct Data {
    std::vector<double> times;
    std::vector<VectorField3> fields;
    Interpolation scheme;
  };
  auto d = std::make_shared<const Data>(Data{std::move(times), std::move(fields), scheme});
  return [d](const Vec3& x, double t) -> Vec3 {
    const auto& ts = d->times;
    if (ts.size() == 1 || t <= ts.front()) return sample(d->fields.front(), x, d->scheme);
    if (t >= ts.back()) return sample(d->fields.back(), x, d->scheme);
    const std::size_t k = std::size_t(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    const double th = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    const Stencil st = make_stencil(d->fields[k].grid, x, d->scheme);
    return (1.0 - th) * sample(d->fields[k - 1], st) + th * sample(d->fields[k], st);
  };
}

Vec3 rk4_particle_step(const VelocityProvider& u, const Vec3& x, double t, double dt) {
  const Vec3 k1 = u(x, t);
  const Vec3 k2 = u(x + 0.5 * dt * k1, t + 0.5 * dt);
  const Vec3 k3 = u(x + 0.5 * dt * k2, t + 0.5 * dt);
  const Vec3 k4 = u(x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectories advect_particles(const VelocityProvider& u, const std::vector<Vec3>& points, double t1, double t2,
                              double dt) {
  if (!(t2 > t1)) throw DomainError("advect_particles: t2 must exceed t1");
  if (!(dt > 0.0)) throw DomainError("advect_particles: dt must be > 0");
  const long n = std::max(1L, long(std::ceil((t2 - t1) / dt - 1e-9)));
  const double h = (t2 - t1) / double(n);
  Trajectories tr;
  tr.times.reserve(std::size_t(n) + 1);
  tr.positions.reserve(std::size_t(n) + 1);
  tr.times.push_back(t1);
  tr.positions.push_back(points);
  for (long k = 1; k <= n; ++k) {
    const double t = t1 + double(k - 1) * h;
    std::vector<Vec3> next(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) next[p] = rk4_particle_step(u, tr.positions.back()[p], t, h);
    tr.times.push_back(k == n ? t2 : t1 + double(k) * h);
    tr.positions.push_back(std::move(next));
  }
  return tr;
}

namespace {

std::vector<double> cumulative_chord(const std::vector<Vec3>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) s[k] = s[k - 1] + (pts[k] - pts[k - 1]).norm();
  return s;
}

bool spacing_degraded(const MaterialLine& line) {
  for (std::size_t k = 1; k < line.current_points.size(); ++k) {
    const double g0 = line.beta[k] - line.beta[k - 1];
    if ((line.current_points[k] - line.current_points[k - 1]).norm() > 10.0 * g0) return true;
  }
  return false;
}

}  // namespace

double MaterialLine::length() const { return current_points.size() < 2 ? 0.0 : cumulative_chord(current_points).back(); }

MaterialLine material_line_from_points(std::vector<Vec3> points, double t1) {
  if (points.size() < 2) throw DomainError("material line needs at least two markers");
  MaterialLine line;
  line.beta = cumulative_chord(points);
  for (std::size_t k = 1; k < line.beta.size(); ++k) {
    if (!(line.beta[k] > line.beta[k - 1])) throw DomainError("material line markers must be distinct");
  }
  line.alpha_points = points;
  line.current_points = std::move(points);
  line.t1 = t1;
  line.t = t1;
  return line;
}

MaterialLine seed_material_line(const MaskedDirectionField& xi, const Vec3& seed, double length, int markers,
                                double t1) {
  if (markers < 2) throw DomainError("seed_material_line: need at least two markers");
  const double spacing = length / double(markers - 1);
  const long sub = std::max(1L, long(std::ceil(spacing / default_step(xi.xi.grid) - 1e-9)));
  const VortexLine line = trace_line(xi, seed, length, spacing / double(sub), +1);
  const std::size_t need = std::size_t(markers - 1) * std::size_t(sub) + 1;
  if (line.terminated_reason != Termination::max_length || line.samples.size() != need) {
    throw NumericalError(std::string("seed_material_line: vortex line stopped early (") +
                         to_string(line.terminated_reason) + ")");
  }
  std::vector<Vec3> pts(static_cast<std::size_t>(markers));
  for (int j = 0; j < markers; ++j) pts[std::size_t(j)] = line.samples[std::size_t(j) * std::size_t(sub)].position;
  return material_line_from_points(std::move(pts), t1);
}

MaterialLine track_material_line(const MaterialLine& line, const VelocityProvider& u, double t2, double dt) {
  MaterialLine out = line;
  if (t2 == line.t) return out;
  const Trajectories tr = advect_particles(u, line.current_points, line.t, t2, dt);
  out.current_points = tr.positions.back();
  out.t = t2;
  out.spacing_warning = line.spacing_warning || spacing_degraded(out);
  return out;
}

namespace {

// d/dj of the marker polyline by 4th-order differences in the marker index.
Vec3 index_derivative(const std::vector<Vec3>& x, std::size_t j) {
  const std::size_t n = x.size();
  if (j >= 2 && j + 2 < n) return (x[j - 2] - 8.0 * x[j - 1] + 8.0 * x[j + 1] - x[j + 2]) / 12.0;
  if (j == 0) return (-25.0 * x[0] + 48.0 * x[1] - 36.0 * x[2] + 16.0 * x[3] - 3.0 * x[4]) / 12.0;
  if (j == 1) return (-3.0 * x[0] - 10.0 * x[1] + 18.0 * x[2] - 6.0 * x[3] + x[4]) / 12.0;
  if (j == n - 1) {
    return (25.0 * x[n - 1] - 48.0 * x[n - 2] + 36.0 * x[n - 3] - 16.0 * x[n - 4] + 3.0 * x[n - 5]) / 12.0;
  }
  return (3.0 * x[n - 1] + 10.0 * x[n - 2] - 18.0 * x[n - 3] + 6.0 * x[n - 4] - x[n - 5]) / 12.0;
}

}  // namespace

std::vector<double> arc_length_stretching(const MaterialLine& line) {
  const std::size_t n = line.current_points.size();
  std::vector<double> d(n);
  if (n >= 5) {
    // s_beta = |dX_t/dj| / |dX_t1/dj|: the marker index is a common
    // Lagrangian parameter, so no chord-length error enters.
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = index_derivative(line.current_points, j).norm() / index_derivative(line.alpha_points, j).norm();
    }
    return d;
  }
  const std::vector<double> s = cumulative_chord(line.current_points);
  const std::vector<double>& b = line.beta;
  if (n == 2) {
    d[0] = d[1] = (s[1] - s[0]) / (b[1] - b[0]);
    return d;
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double h1 = b[j] - b[j - 1], h2 = b[j + 1] - b[j];
    d[j] = -h2 / (h1 * (h1 + h2)) * s[j - 1] + (h2 - h1) / (h1 * h2) * s[j] + h1 / (h2 * (h1 + h2)) * s[j + 1];
  }
  {
    const double h1 = b[1] - b[0], h2 = b[2] - b[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * s[0] + (h1 + h2) / (h1 * h2) * s[1] - h1 / (h2 * (h1 + h2)) * s[2];
  }
  {
    const double h1 = b[n - 2] - b[n - 3], h2 = b[n - 1] - b[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * s[n - 3] - (h1 + h2) / (h1 * h2) * s[n - 2] +
               (h1 + 2 * h2) / (h2 * (h1 + h2)) * s[n - 1];
  }
  return d;
}

LemmaTwoReport check_lemma2(const MaterialLine& line, const VectorField3& omega_t1, const VectorField3& omega_t,
                            Interpolation scheme) {
  const ScalarField3 m1 = magnitude(omega_t1);
  const ScalarField3 m2 = magnitude(omega_t);
  const double floor1 = kDefaultEpsRel * max_abs(m1);
  const double floor2 = kDefaultEpsRel * max_abs(m2);
  LemmaTwoReport r;
  r.s_beta = arc_length_stretching(line);
  const std::size_t n = r.s_beta.size();
  r.residual.assign(n, std::nan(""));
  r.omega_ratio.assign(n, std::nan(""));
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w1 = sample(m1, line.alpha_points[j], scheme);
    const double w2 = sample(m2, line.current_points[j], scheme);
    if (!(w1 > floor1) || !(w2 > floor2)) {
      r.excluded.push_back(int(j));
      continue;
    }
    r.omega_ratio[j] = w2 / w1;
    r.residual[j] = std::abs(r.s_beta[j] - r.omega_ratio[j]) / r.s_beta[j];
    r.max_residual = std::max(r.max_residual, r.residual[j]);
    sum += r.residual[j];
    ++used;
  }
  if (used == 0) throw NumericalError("check_lemma2: vorticity vanishes at every marker");
  r.mean_residual = sum / double(used);
  return r;
}

MaterialLineStats measure_material_line(const MaterialLine& line, const FlowGeometry& geo, Interpolation scheme) {
  MaterialLineStats st;
  st.t = line.t;
  st.l = line.length();
  st.omega_mag.reserve(line.current_points.size());
  double umin = HUGE_VAL, umax = -HUGE_VAL;
  for (const Vec3& x : line.current_points) {
    bool ok = false;
    const LineSample p = probe(geo, x, scheme, &ok);
    if (!ok) throw NumericalError("material line leaves the region where the vortex geometry is defined");
    st.M = std::max({st.M, std::abs(p.div_xi), p.kappa});
    st.U_n = std::max(st.U_n, std::abs(p.u_norm));
    umin = std::min(umin, p.u_tan);
    umax = std::max(umax, p.u_tan);
    st.Omega_l = std::max(st.Omega_l, p.omega_mag);
    st.omega_mag.push_back(p.omega_mag);
  }
  st.U_xi = umax - umin;
  return st;
}

StretchingReport check_stretching_inequalities(const std::vector<MaterialLineStats>& history, double tolerance) {
  if (history.empty()) throw DomainError("check_stretching_inequalities: empty history");
  StretchingReport rep;
  rep.tolerance = tolerance;
  rep.worst_omega_margin = rep.worst_length_margin = rep.worst_growth_margin = HUGE_VAL;
  const MaterialLineStats& h0 = history.front();
  // Relative slack of a <= b; the bound holds when a <= b (1 + tolerance).
  auto margin = [](double a, double b) { return a > 0.0 ? b / a - 1.0 : (b >= 0.0 ? 0.0 : -HUGE_VAL); };
  auto integrand = [](const MaterialLineStats& s) { return s.U_xi + s.M * s.U_n * s.l; };
  double integral = 0.0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const MaterialLineStats& hi = history[i];
    if (hi.omega_mag.size() != h0.omega_mag.size()) throw DomainError("check_stretching_inequalities: marker count changed");
    integral += 0.5 * (hi.t - history[i - 1].t) * (integrand(hi) + integrand(history[i - 1]));
    StretchingRow row;
    row.t = hi.t;
    row.l_ratio = hi.l / h0.l;
    row.exponent = hi.M * hi.l + h0.M * h0.l;
    const double e = std::exp(row.exponent);
    row.omega_margin = HUGE_VAL;
    for (std::size_t j = 0; j < h0.omega_mag.size(); ++j) {
      const double ratio = hi.omega_mag[j] / h0.omega_mag[j];
      const double lo = margin(ratio / e, row.l_ratio);
      const double up = margin(row.l_ratio, e * ratio);
      row.omega_margin = std::min({row.omega_margin, lo, up});
      row.identity_residual = std::max(row.identity_residual, std::abs(row.l_ratio - ratio) / row.l_ratio);
    }
    row.length_lhs = hi.l;
    row.length_rhs = h0.l + integral;
    row.growth_lhs = hi.Omega_l;
    row.growth_rhs = e * h0.Omega_l * (1.0 + integral / h0.l);
    const double lm = margin(row.length_lhs, row.length_rhs);
    const double gm = margin(row.growth_lhs, row.growth_rhs);
    rep.worst_omega_margin = std::min(rep.worst_omega_margin, row.omega_margin);
    rep.worst_length_margin = std::min(rep.worst_length_margin, lm);
    rep.worst_growth_margin = std::min(rep.worst_growth_margin, gm);
    rep.max_identity_residual = std::max(rep.max_identity_residual, row.identity_residual);
    rep.rows.push_back(row);
  }
  const double need = 1.0 / (1.0 + tolerance) - 1.0;
  if (!rep.rows.empty()) {
    rep.holds = rep.worst_omega_margin >= need && rep.worst_length_margin >= need && rep.worst_growth_margin >= need;
  }
  return rep;
}

double circulation(const std::vector<Vec3>& loop, const VectorField3& u, Interpolation scheme) {
  if (loop.size() < 3) throw DomainError("circulation: loop needs at least three markers");
  double c = 0.0;
  Vec3 ua = sample(u, loop[0], scheme);
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec3& a = loop[k];
    const Vec3& b = loop[(k + 1) % loop.size()];
    const Vec3 ub = sample(u, b, scheme);
    c += 0.5 * (ua + ub).dot(b - a);
    ua = ub;
  }
  return c;
}

RunResult run_with_diagnostics(const VectorField3& initial, const RunOptions& opt,
                               const std::function<void(const DiagnosticFrame&)>& on_frame) {
  if (!(opt.t_end > 0.0)) throw ConfigError("run: t_end must be > 0");
  if (!(opt.dt > 0.0)) throw ConfigError("run: dt must be > 0");
  if (opt.every < 1) throw ConfigError("run: every must be >= 1");
  if (!(opt.line_length > 0.0)) throw ConfigError("run: line length must be > 0");
  if (opt.seed_policy == SeedPolicy::length_fraction && !(opt.length_fraction > 0.0)) {
    throw ConfigError("run: length fraction must be > 0");
  }
  const long n = std::max(1L, long(std::ceil(opt.t_end / opt.dt - 1e-9)));
  const double h = opt.t_end / double(n);

  RunResult res;
  SimState state = SimState::from_velocity(initial, 0.0);
  const Grid3 grid = state.grid;
  VectorField3 u = state.velocity();
  std::optional<Vec3> carried;
  std::optional<MaterialLine> material;
  int frame = 0;

  auto diagnose = [&](double t) {
    const VectorField3 omega = state.vorticity();
    const FlowGeometry geo = FlowGeometry::build(omega, u);
    const MaxVorticity mx = find_max_vorticity_point(geo.omega_mag);
    if (opt.seed_policy == SeedPolicy::lagrangian && !carried) carried = mx.point;
    if (opt.material_seed && !material) {
      material = seed_material_line(geo.xi, *opt.material_seed, opt.material_length, opt.material_markers, t);
    }
    const double len =
        opt.seed_policy == SeedPolicy::length_fraction ? opt.length_fraction * grid.lx : opt.line_length;
    const Vec3 through = opt.seed_policy == SeedPolicy::lagrangian ? *carried : mx.point;
    VortexLine line = trace_through(geo.xi, through, len, default_step(grid));
    const LineDiagnostics ld = line_diagnostics(line, geo);
    TimelineRow row;
    row.t = t;
    row.Omega = mx.Omega;
    row.energy = energy(u);
    row.U_max = max_norm(u);
    row.L_line = ld.arc_length;
    row.M_line = ld.M_line;
    row.U_xi = ld.U_xi_line;
    row.U_n = ld.U_n_line;
    row.ML_product = ld.M_line * ld.arc_length;
    res.timeline.append(row);
    if (material) res.material_stats.push_back(measure_material_line(*material, geo));
    res.lines.push_back(line);
    if (on_frame) {
      const DiagnosticFrame f{frame, t, u, omega, geo, res.lines.back(), material ? &*material : nullptr};
      on_frame(f);
    }
    ++frame;
  };

  diagnose(0.0);
  res.max_spectral_divergence = spectral_divergence(state);
  for (long k = 1; k <= n; ++k) {
    const double t0 = double(k - 1) * h;
    const double t1 = k == n ? opt.t_end : double(k) * h;
    SimState next = step(state, h, opt.solver);
    next.t = t1;
    VectorField3 u_next = next.velocity();
    if (material || carried) {
      const VectorField3& ua = u;
      const VectorField3& ub = u_next;
      const VelocityProvider lin = [&](const Vec3& x, double t) -> Vec3 {
        const Stencil st = make_stencil(grid, x, Interpolation::quintic);
        const double th = (t - t0) / (t1 - t0);
        return (1.0 - th) * sample(ua, st) + th * sample(ub, st);
      };
      if (material) {
        for (Vec3& p : material->current_points) p = rk4_particle_step(lin, p, t0, t1 - t0);
        material->t = t1;
        material->spacing_warning = material->spacing_warning || spacing_degraded(*material);
      }
      if (carried) carried = rk4_particle_step(lin, *carried, t0, t1 - t0);
    }
    state = std::move(next);
    u = std::move(u_next);
    res.max_spectral_divergence = std::max(res.max_spectral_divergence, spectral_divergence(state));
    if (k % opt.every == 0 || k == n) diagnose(t1);
  }
  res.material = material;
  res.final_state = std::move(state);
  return res;
}

}  // namespace vld
