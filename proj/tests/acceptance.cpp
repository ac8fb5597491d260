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
// Acceptance driver: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "vld/biot_savart.hpp"
#include "vld/cli.hpp"
#include "vld/criteria.hpp"
#include "vld/euler.hpp"
#include "vld/fields.hpp"
#include "vld/format.hpp"
#include "vld/interp.hpp"
#include "vld/spectral.hpp"
#include "vld/vortex_line.hpp"

using namespace vld;
namespace fs = std::filesystem;

namespace {

std::string g3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    detail.push_back(what + (ok ? "" : " [FAIL]"));
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

VectorField3 abc_field(int n) {
  return VectorField3::from_function(Grid3::cube(n), [](const Vec3& x) { return abc_velocity(x); });
}

double max_diff(const VectorField3& a, const VectorField3& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, (a.comp[c] - b.comp[c]).abs().maxCoeff());
  return m;
}

// Every traced line of every run, for the corridor criterion.
struct TracedSet {
  std::string label;
  std::vector<VortexLine> lines;
};
std::vector<TracedSet> g_lines;

VortexLine annotated(const VectorField3& omega, const Vec3& seed, double length) {
  const FlowGeometry geo = FlowGeometry::build(omega, velocity_from_vorticity(omega));
  VortexLine line = trace_line(geo.xi, seed, length, default_step(omega.grid));
  line_diagnostics(line, geo);
  return line;
}

// ---- shared runs ----

struct Runs {
  RunResult abc;
  double abc_seconds = 0.0;
  VectorField3 abc_u0;
  RunResult tg;
  RunResult tubes;
  std::vector<VelocityBoundReport> tg_bounds, tube_bounds;
};

Runs& runs_abc(Runs& r) {
  if (!r.abc.timeline.rows.empty()) return r;
  const auto t0 = Clock::now();
  r.abc_u0 = abc_field(64);
  RunOptions opt;
  opt.t_end = 0.5;
  opt.dt = 1e-3;
  opt.every = 50;
  opt.material_seed = Vec3(0.1, 0.2, 0.3);
  opt.material_length = 1.0;
  r.abc = run_with_diagnostics(r.abc_u0, opt);
  r.abc_seconds = seconds_since(t0);
  g_lines.push_back({"ABC 64^3", r.abc.lines});
  return r;
}

RunResult bounded_run(const VectorField3& u0, double dt, double t_end, int every,
                      std::vector<VelocityBoundReport>& bounds) {
  RunOptions opt;
  opt.t_end = t_end;
  opt.dt = dt;
  opt.every = every;
  const double l2 = l2_norm(u0);
  return run_with_diagnostics(u0, opt, [&](const DiagnosticFrame& f) {
    bounds.push_back(check_35_bound(f.u, f.omega, l2));
  });
}

Runs& runs_flows(Runs& r) {
  if (!r.tg.timeline.rows.empty()) return r;
  const VectorField3 tg = VectorField3::from_function(Grid3::cube(32), [](const Vec3& x) { return taylor_green_velocity(x); });
  r.tg = bounded_run(tg, 1e-2, 1.0, 10, r.tg_bounds);
  g_lines.push_back({"TG 32^3", r.tg.lines});
  r.tubes = bounded_run(gen_field(AntiparallelTubes{}, Grid3::cube(32)), 5e-3, 0.5, 10, r.tube_bounds);
  g_lines.push_back({"tubes 32^3", r.tubes.lines});
  return r;
}

// ---- criteria ----

Outcome lemma1() {
  Outcome o;
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    std::function<VectorField3(int)> omega;
    Vec3 seed;
    double length;
  };
  const std::vector<Case> cases{
      {"(1,0,sin x)",
       [](int n) {
         return VectorField3::from_function(Grid3::cube(n), [](const Vec3& x) { return Vec3(1.0, 0.0, std::sin(x.x())); });
       },
       Vec3(0.3, 0.5, 0.7), 2.0},
      {"ABC", [](int n) { return curl(abc_field(n)); }, Vec3(0.1, 0.2, 0.3), 1.0},
  };
  for (const auto& c : cases) {
    const VortexLine l64 = annotated(c.omega(64), c.seed, c.length);
    const VortexLine l128 = annotated(c.omega(128), c.seed, c.length);
    g_lines.push_back({std::string("Lemma 1 ") + c.name, {l64, l128}});
    const double r64 = check_lemma1(l64).max_rel_residual;
    const double r128 = check_lemma1(l128).max_rel_residual;
    o.require(l64.length() >= 1.0 && l128.length() >= 1.0, std::string(c.name) + " length " + g3(l64.length()));
    o.require(r64 <= 1e-5, std::string(c.name) + " residual 64^3 " + g3(r64) + " <= 1e-5");
    o.require(r64 / r128 >= 4.0, std::string(c.name) + " drop at 128^3 " + g3(r64 / r128) + "x >= 4x");
  }
  const double secs = seconds_since(t0);
  o.require(secs <= 30.0, "runtime " + g3(secs) + " s <= 30 s");
  return o;
}

Outcome lemma2(Runs& runs) {
  Outcome o;
  const auto t0 = Clock::now();
  runs_abc(runs);
  const RunResult& r = runs.abc;
  const double res = check_lemma2(*r.material, curl(runs.abc_u0), r.final_state.vorticity()).max_residual;
  o.require(res <= 1e-3, "ABC 64^3 dt 1e-3 t 0.5 residual " + g3(res) + " <= 1e-3");

  const double gamma = 0.5, T = 0.4, w0 = 2.0;
  const Grid3 g = Grid3::cube(16, 8.0);
  const Vec3 c(4, 4, 4);
  const VelocityProvider strain = [&](const Vec3& x, double) {
    const Vec3 d = x - c;
    return Vec3(-gamma * d.x(), -gamma * d.y(), 2 * gamma * d.z());
  };
  std::vector<Vec3> pts;
  for (int k = 0; k <= 32; ++k) pts.push_back(c + Vec3(0, 0, -0.5 + k / 32.0));
  const MaterialLine later = track_material_line(material_line_from_points(pts), strain, T, 1e-3);
  const double e = std::exp(2 * gamma * T);
  const auto wa = VectorField3::from_function(g, [&](const Vec3&) { return Vec3(0, 0, w0); });
  const auto wb = VectorField3::from_function(g, [&](const Vec3&) { return Vec3(0, 0, w0 * e); });
  const LemmaTwoReport rep = check_lemma2(later, wa, wb);
  double worst = 0.0;
  for (double s : rep.s_beta) worst = std::max(worst, std::abs(s - e) / e);
  o.require(worst <= 1e-4, "uniform strain s_beta vs e^{2 gamma t} " + g3(worst) + " <= 1e-4");
  const double secs = seconds_since(t0);
  o.require(secs <= 300.0, "runtime " + g3(secs) + " s <= 300 s");
  return o;
}

// Straight material segment on the z axis of a uniform strain. Stats are
// measured on the tracked markers; the vorticity w0 e^{2 gamma t} is exact.
std::vector<MaterialLineStats> strain_history(double gamma, double w0) {
  const Vec3 c(4, 4, 4);
  const auto u = [&](const Vec3& x) {
    const Vec3 d = x - c;
    return Vec3(-gamma * d.x(), -gamma * d.y(), 2 * gamma * d.z());
  };
  const VelocityProvider strain = [&](const Vec3& x, double) { return u(x); };
  std::vector<Vec3> pts;
  for (int k = 0; k <= 32; ++k) pts.push_back(c + Vec3(0, 0, -0.5 + k / 32.0));
  MaterialLine line = material_line_from_points(pts);
  std::vector<MaterialLineStats> h;
  for (int k = 0; k <= 4; ++k) {
    if (k > 0) line = track_material_line(line, strain, 0.1 * k, 1e-3);
    MaterialLineStats s;
    s.t = 0.1 * k;
    s.l = line.length();
    const double w = w0 * std::exp(2 * gamma * s.t);
    double lo = INFINITY, hi = -INFINITY, un = 0.0;
    for (const Vec3& p : line.current_points) {
      const Vec3 v = u(p);
      lo = std::min(lo, v.z());
      hi = std::max(hi, v.z());
      un = std::max(un, std::hypot(v.x(), v.y()));
    }
    s.U_xi = hi - lo;
    s.U_n = un;
    s.M = 0.0;
    s.Omega_l = w;
    s.omega_mag.assign(line.current_points.size(), w);
    h.push_back(s);
  }
  return h;
}

Outcome stretching(Runs& runs) {
  Outcome o;
  runs_abc(runs);
  const StretchingReport a = check_stretching_inequalities(runs.abc.material_stats, 1e-2);
  o.require(a.holds, "ABC 64^3 margins omega " + g3(a.worst_omega_margin) + " length " + g3(a.worst_length_margin) +
                         " growth " + g3(a.worst_growth_margin));
  const StretchingReport s = check_stretching_inequalities(strain_history(0.5, 2.0), 1e-2);
  o.require(s.holds, "uniform strain margins omega " + g3(s.worst_omega_margin) + " length " +
                         g3(s.worst_length_margin) + " growth " + g3(s.worst_growth_margin));
  o.require(s.max_identity_residual <= 1e-6, "M = 0 identity residual " + g3(s.max_identity_residual) + " <= 1e-6");
  return o;
}

Outcome cutoff(Runs& runs) {
  Outcome o;
  o.require(optimal_rho(32.0) == 0.25, "optimal_rho(32) = " + fmt17(optimal_rho(32.0)));
  std::vector<double> v;
  for (double W : {1.0, 10.0, 1e2, 1e4}) v.push_back(cutoff_bound(W, 1.0, std::pow(W, -0.4)).total_bound / std::pow(W, 0.6));
  double spread = 0.0;
  for (double x : v) spread = std::max(spread, std::abs(x - v[0]) / v[0]);
  o.require(spread <= 1e-12, "total_bound / Omega^{3/5} spread " + g3(spread) + " <= 1e-12");
  runs_flows(runs);
  auto all_pass = [](const std::vector<VelocityBoundReport>& b) {
    double worst = 0.0;
    bool ok = !b.empty();
    for (const auto& r : b) {
      ok = ok && r.pass;
      worst = std::max(worst, r.U_measured / r.bound_value);
    }
    return std::pair{ok, worst};
  };
  const auto [tg_ok, tg_w] = all_pass(runs.tg_bounds);
  const auto [tu_ok, tu_w] = all_pass(runs.tube_bounds);
  o.require(tg_ok, "TG: " + std::to_string(runs.tg_bounds.size()) + " steps pass, max U/bound " + g3(tg_w));
  o.require(tu_ok, "tubes: " + std::to_string(runs.tube_bounds.size()) + " steps pass, max U/bound " + g3(tu_w));
  return o;
}

Outcome biot_savart() {
  Outcome o;
  const auto t0 = Clock::now();
  const VectorField3 w = curl(gen_field(RandomSolenoidal{11}, Grid3::cube(32)));
  const double inv = max_diff(curl(bs_spectral_invert(w)), w);
  o.require(inv <= 1e-10, "curl(invert(omega)) - omega " + g3(inv) + " <= 1e-10 (max |omega| " + g3(max_norm(w)) + ")");

  const double l = 12.0, R = 1.0, G = 1.0;
  const Grid3 g = Grid3::cube(128, l);
  const Vec3 c(l / 2, l / 2, l / 2);
  const VectorField3 ring = vortex_ring_vorticity(g, c, R, G, 0.2);
  const VectorField3 up = bs_spectral_invert(ring);
  const double uc = sample(up, c, Interpolation::quintic).z();
  const double err = std::abs(uc - G / (2 * R)) / (G / (2 * R));
  o.require(err <= 0.05, "padded-box ring centre " + g3(uc) + " vs Gamma/2R, error " + g3(err) + " <= 5%");

  // Compared at grid nodes so that no interpolation error enters.
  std::vector<Vec3> pts;
  std::vector<Index> nodes;
  const int m = 64;
  for (const auto& d : std::vector<std::array<int, 3>>{
           {0, 0, 0}, {5, 0, 3}, {0, -11, 5}, {3, 3, -4}, {-6, 2, 0}, {0, 0, 11}, {16, 0, 0}, {2, -5, -9}}) {
    nodes.push_back(g.index(m + d[0], m + d[1], m + d[2]));
    pts.push_back(g.node(nodes.back()));
  }
  const auto uf = bs_velocity(ring, pts);
  const double umax = max_abs(magnitude(up));
  double worst = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) worst = std::max(worst, (up.at(nodes[p]) - uf[p]).norm() / umax);
  o.require(worst <= 0.01, "spectral vs direct at " + std::to_string(pts.size()) + " interior nodes " + g3(worst) +
                               " of max |u| <= 1%");
  const double secs = seconds_since(t0);
  o.require(secs <= 600.0, "runtime " + g3(secs) + " s <= 600 s");
  return o;
}

Outcome solver(Runs& runs) {
  Outcome o;
  runs_flows(runs);
  runs_abc(runs);
  const auto& rows = runs.tg.timeline.rows;
  const double drift = std::abs(rows.back().energy - rows.front().energy) / rows.front().energy;
  o.require(rows.back().t == 1.0 && drift <= 1e-8, "TG 32^3 energy drift on [0,1] " + g3(drift) + " <= 1e-8");
  const double steady = max_diff(runs.abc.final_state.velocity(), runs.abc_u0) / max_norm(runs.abc_u0);
  o.require(steady <= 1e-6, "ABC 64^3 |u(0.5) - u(0)| / |u(0)| " + g3(steady) + " <= 1e-6");
  const double div = std::max({runs.tg.max_spectral_divergence, runs.tubes.max_spectral_divergence,
                               runs.abc.max_spectral_divergence});
  o.require(div <= 1e-12, "spectral divergence, every step of TG, tubes, ABC: " + g3(div) + " <= 1e-12");
  return o;
}

Outcome arithmetic() {
  Outcome o;
  double worst = 0.0;
  for (double gamma : {1.0, 2.0}) {
    for (double r : {2.0, 3.0}) {
      const double T = 1.0, gap1 = 0.5;
      const SequenceModel m = build_doubling_sequence([&](double t) { return std::pow(T - t, -gamma); }, r, T - gap1, T, 30);
      for (std::size_t k = 0; k < m.gaps.size(); ++k) {
        const double expect = gap1 * std::pow(r, -double(k) / gamma);
        // Relative where t resolves the gap to 1e-10, absolute in (T - t1) below.
        const double scale = expect >= 1e-5 ? expect : gap1;
        worst = std::max(worst, std::abs(m.gaps[k] - expect) / scale);
      }
    }
  }
  o.require(worst <= 1e-10, "doubling sequence vs closed form, gamma 1 and 2: " + g3(worst) + " <= 1e-10");

  int mismatches = 0, points = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double r = 1.0 + 0.5 * i, x = 0.05 + 0.1 * j;
      mismatches += series_verdict(r, x).converges != (r * x < 1.0);
      ++points;
    }
  }
  o.require(mismatches == 0, "series verdict vs r x < 1: " + std::to_string(mismatches) + " of " +
                                 std::to_string(points) + " differ");
  mismatches = points = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double a = 0.05 + 0.1 * i, b = 0.03 + 0.1 * j;
      mismatches += (delta_exponent(a, b) > 0.0) != (b < 1.0 - a);
      ++points;
    }
  }
  o.require(mismatches == 0, "delta sign vs beta < 1 - alpha: " + std::to_string(mismatches) + " of " +
                                 std::to_string(points) + " differ");
  return o;
}

Outcome presets() {
  Outcome o;
  const CriterionVerdict kerr = theorem2_check(scenario_preset("kerr"));
  o.require(kerr.verdict == Verdict::no_blowup_excluded, std::string("kerr ") + to_string(kerr.verdict));
  const CriterionVerdict cfm = theorem2_check(scenario_preset("cfm"));
  bool boundary_note = false;
  for (const auto& n : cfm.notes) boundary_note = boundary_note || n.find("boundary") != std::string::npos;
  o.require(cfm.verdict == Verdict::inconclusive && boundary_note, std::string("cfm ") + to_string(cfm.verdict) +
                                                                       (boundary_note ? " with boundary note" : ""));
  ScalingScenario s;
  s.alpha = 0.5;
  s.beta = 0.5;
  const CriterionVerdict v = theorem2_check(s);
  o.require(v.verdict == Verdict::conditions_violated, std::string("alpha 0.5 beta 0.5 ") + to_string(v.verdict));

  int changed = 0, tried = 0;
  std::vector<ScalingScenario> all = scenario_library();
  all.push_back(s);
  for (const auto& base : all) {
    const Verdict ref = theorem2_check(base).verdict;
    for (double c0 : {0.1, 0.5, 1.0}) {
      for (double gamma : {0.5, 1.0, 2.0, 4.0}) {
        ScalingScenario p = base;
        p.c0 = c0;
        p.gamma = gamma;
        changed += theorem2_check(p).verdict != ref;
        ++tried;
      }
    }
  }
  o.require(changed == 0, "verdicts under c0, gamma perturbation: " + std::to_string(changed) + " of " +
                              std::to_string(tried) + " changed");
  return o;
}

Outcome corridor(Runs& runs) {
  Outcome o;
  runs_abc(runs);
  runs_flows(runs);
  for (const auto& set : g_lines) {
    int bad = 0;
    double slack = INFINITY, tau = 0.0;
    for (const auto& line : set.lines) {
      const CorridorCheck c = ratio_corridor(check_lemma1(line), 10.0);
      bad += !c.holds;
      slack = std::min(slack, c.worst_slack);
      tau = std::max(tau, c.tau);
    }
    o.require(bad == 0 && !set.lines.empty(), set.label + ": " + std::to_string(set.lines.size()) + " lines, " +
                                                  std::to_string(bad) + " outside, min slack " + g3(slack) +
                                                  ", max tau " + g3(tau));
  }
  return o;
}

struct CliCall {
  int code;
  std::string out;
};

CliCall cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vld");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "vld_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> timelines, series, verdicts;
  for (const char* name : {"a", "b"}) {
    const fs::path dir = root / name;
    const CliCall e = cli({"evolve", "--init", "random", "--rng-seed", "3", "--n", "24", "--dt", "5e-3", "--t-end",
                           "0.1", "--every", "4", "--out", dir.string(), "--material-seed", "1,2,3", "--no-snapshots"});
    o.require(e.code == 0, std::string("run ") + name + " exit " + std::to_string(e.code));
    timelines.push_back(slurp(dir / "timeline.csv"));
    series.push_back(slurp(dir / "line_series.csv"));
    std::string v = cli({"check-thm1", "--timeline", dir.string()}).out;
    v += cli({"check-thm2", "--alpha", "0.3", "--beta", "0.4"}).out;
    v += cli({"scenario", "--list"}).out;
    v += cli({"replay", "--preset", "kerr", "--C0", "0.5", "--c0", "1"}).out;
    verdicts.push_back(v);
  }
  fs::remove_all(root);
  o.require(!timelines[0].empty() && timelines[0] == timelines[1],
            "timeline.csv byte identical (" + std::to_string(timelines[0].size()) + " bytes)");
  o.require(!series[0].empty() && series[0] == series[1], "line_series.csv byte identical");
  o.require(!verdicts[0].empty() && verdicts[0] == verdicts[1],
            "verdict JSON byte identical (" + std::to_string(verdicts[0].size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  Runs runs;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Lemma 1 identity", lemma1},
      {"Lemma 2 identity", [&] { return lemma2(runs); }},
      {"stretching inequalities", [&] { return stretching(runs); }},
      {"cutoff velocity bound", [&] { return cutoff(runs); }},
      {"Biot-Savart", biot_savart},
      {"solver quality gates", [&] { return solver(runs); }},
      {"proof arithmetic", arithmetic},
      {"scenario presets", presets},
      {"Theorem 1 corridor", [&] { return corridor(runs); }},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail.push_back(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::string joined;
    for (const auto& d : o.detail) joined += (joined.empty() ? "" : "; ") + d;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (k + 1) << ' ' << criteria[k].first << " (" << g3(seconds_since(t0))
              << " s): " << joined << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
