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
#include "vld/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vld/biot_savart.hpp"
#include "vld/criteria.hpp"
#include "vld/euler.hpp"
#include "vld/format.hpp"
#include "vld/run_io.hpp"
#include "vld/spectral.hpp"
#include "vld/vlf_io.hpp"
#include "vld/vortex_line.hpp"

namespace vld {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

Vec3 parse_vec3(const std::string& text, const char* what) {
  std::istringstream is(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(is, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": expected x,y,z, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw ConfigError(std::string(what) + ": expected x,y,z, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + p.string());
  return is;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(flag) + ": no such file " + path);
}

// Velocity and vorticity from a VLF1 file holding either one.
VectorField3 load_velocity(const std::string& path) {
  std::string name;
  VectorField3 v = read_vlf_vector(path, &name);
  return name == "omega" ? velocity_from_vorticity(v) : v;
}

VectorField3 load_vorticity(const std::string& path) {
  std::string name;
  VectorField3 v = read_vlf_vector(path, &name);
  return name == "omega" ? v : curl(v);
}

std::size_t nearest_sample(const VortexLine& line, const Grid3& g) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < line.samples.size(); ++k) {
    const double d = g.min_image(line.seed, line.samples[k].position).norm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

int verdict_exit(Verdict v) { return v == Verdict::conditions_violated ? kExitCheckFailed : kExitOk; }

// ---- gen ----

struct GenArgs {
  std::string kind = "tg";
  int n = 32;
  std::string out;
  bool omega = false;
  std::uint64_t rng_seed = 1;
  std::string abc = "1,1,1";
  double radius = 1.0;
  double sigma = 0.15;
  double circulation = 1.0;
  double box = kTwoPi;
};

void add_field_options(CLI::App* sub, GenArgs& a) {
  sub->add_option("--kind", a.kind, "abc, tg, tubes, shear, random or ring")
      ->check(CLI::IsMember({"abc", "tg", "tubes", "shear", "random", "ring"}))
      ->capture_default_str();
  sub->add_option("--n", a.n, "grid points per axis")->capture_default_str();
  sub->add_option("--rng-seed", a.rng_seed, "seed for --kind random")->capture_default_str();
  sub->add_option("--abc", a.abc, "ABC coefficients A,B,C")->capture_default_str();
  sub->add_option("--radius", a.radius, "ring radius")->capture_default_str();
  sub->add_option("--sigma", a.sigma, "ring core width")->capture_default_str();
  sub->add_option("--circulation", a.circulation, "ring circulation")->capture_default_str();
  sub->add_option("--box", a.box, "ring box length")->capture_default_str();
}

// Returns the generated field and whether it is a vorticity.
std::pair<VectorField3, bool> make_field(const GenArgs& a) {
  if (a.kind == "ring") {
    const Grid3 g = Grid3::cube(a.n, a.box);
    g.validate();
    const Vec3 c = 0.5 * g.lengths();
    return {vortex_ring_vorticity(g, c, a.radius, a.circulation, a.sigma), true};
  }
  const Grid3 g = Grid3::cube(a.n);
  FieldKind kind = TaylorGreen{};
  if (a.kind == "abc") {
    const Vec3 p = parse_vec3(a.abc, "--abc");
    kind = AbcFlow{p.x(), p.y(), p.z()};
  } else if (a.kind == "tubes") {
    kind = AntiparallelTubes{};
  } else if (a.kind == "shear") {
    kind = ShearLayer{};
  } else if (a.kind == "random") {
    kind = RandomSolenoidal{a.rng_seed};
  }
  return {gen_field(kind, g), false};
}

json field_config(const GenArgs& a) {
  json j;
  j["kind"] = a.kind;
  j["n"] = a.n;
  if (a.kind == "abc") j["abc"] = a.abc;
  if (a.kind == "random") j["rng_seed"] = a.rng_seed;
  if (a.kind == "ring") {
    j["radius"] = a.radius;
    j["sigma"] = a.sigma;
    j["circulation"] = a.circulation;
    j["box"] = a.box;
  }
  return j;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (a.out.empty()) throw ConfigError("gen: --out is required");
  auto [field, is_omega] = make_field(a);
  VectorField3 result;
  if (a.omega) {
    result = is_omega ? field : curl(field);
  } else {
    result = is_omega ? velocity_from_vorticity(field) : field;
  }
  const std::string name = a.omega ? "omega" : "u";
  write_vlf(a.out, result, name);
  json j;
  j["command"] = "gen";
  j["config"] = field_config(a);
  j["field"] = name;
  j["out"] = a.out;
  j["max_norm"] = max_norm(result);
  j["l2_norm"] = l2_norm(result);
  j["sha256"] = sha256_file(a.out);
  emit(out, j);
  return kExitOk;
}

// ---- evolve ----

struct EvolveArgs {
  GenArgs init;
  std::string init_kind;
  std::string init_file;
  double dt = 1e-3;
  double t_end = 1.0;
  int every = 10;
  double cfl = 0.5;
  bool filter = false;
  std::string out = "run";
  std::string seed_policy = "argmax";
  double line_length = 1.0;
  double length_fraction = 0.25;
  double y_offset = 0.25;
  std::string material_seed;
  double material_length = 1.0;
  int markers = kDefaultMarkers;
  bool no_snapshots = false;
};

std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%06d.vlf", index);
  return buf;
}

int cmd_evolve(const EvolveArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  if (a.init_kind.empty() == a.init_file.empty()) throw ConfigError("evolve: give exactly one of --init, --init-file");
  RunManifest m;
  m.command = "evolve";
  m.argv = argv;
  m.started = utc_timestamp();

  VectorField3 u0;
  json init;
  if (!a.init_file.empty()) {
    require_file(a.init_file, "--init-file");
    u0 = load_velocity(a.init_file);
    init["file"] = a.init_file;
    m.inputs.push_back({a.init_file, sha256_file(a.init_file)});
  } else {
    GenArgs g = a.init;
    g.kind = a.init_kind;
    auto [field, is_omega] = make_field(g);
    u0 = is_omega ? velocity_from_vorticity(field) : field;
    init = field_config(g);
  }

  RunOptions opt;
  opt.t_end = a.t_end;
  opt.dt = a.dt;
  opt.every = a.every;
  opt.solver.cfl = a.cfl;
  opt.solver.spectral_filter = a.filter;
  opt.line_length = a.line_length;
  opt.length_fraction = a.length_fraction;
  if (a.seed_policy == "argmax") {
    opt.seed_policy = SeedPolicy::through_argmax;
  } else if (a.seed_policy == "fraction") {
    opt.seed_policy = SeedPolicy::length_fraction;
  } else {
    opt.seed_policy = SeedPolicy::lagrangian;
  }
  if (!a.material_seed.empty()) opt.material_seed = parse_vec3(a.material_seed, "--material-seed");
  opt.material_length = a.material_length;
  opt.material_markers = a.markers;
  if (!(a.y_offset >= -1.0 && a.y_offset <= 1.0)) throw ConfigError("evolve: --y-offset must lie in [-1, 1]");

  const fs::path dir = a.out;
  fs::create_directories(dir);
  if (!a.no_snapshots) fs::create_directories(dir / "snapshots");

  std::vector<Theorem1Sample> series;
  const RunResult res = run_with_diagnostics(u0, opt, [&](const DiagnosticFrame& f) {
    series.push_back(
        theorem1_sample(f.line, f.t, nearest_sample(f.line, f.u.grid), a.y_offset * f.line.length()));
    if (!a.no_snapshots) {
      const std::string rel = "snapshots/" + snapshot_name(f.index);
      write_vlf(dir / rel, f.u, "u");
      m.snapshots.push_back({f.t, rel});
    }
  });

  {
    auto os = open_out(dir / "timeline.csv");
    write_timeline_csv(os, res.timeline);
  }
  {
    auto os = open_out(dir / "line_series.csv");
    write_line_series_csv(os, series);
  }
  std::vector<std::string> outputs{"timeline.csv", "line_series.csv"};
  if (!res.material_stats.empty()) {
    auto os = open_out(dir / "material.csv");
    write_material_csv(os, res.material_stats);
    outputs.push_back("material.csv");
  }
  for (const auto& s : m.snapshots) outputs.push_back(s.path);
  for (const auto& o : outputs) m.outputs.push_back({o, sha256_file(dir / o)});

  json cfg;
  cfg["init"] = init;
  cfg["dt"] = a.dt;
  cfg["t_end"] = a.t_end;
  cfg["every"] = a.every;
  cfg["cfl"] = a.cfl;
  cfg["filter"] = a.filter;
  cfg["seed_policy"] = a.seed_policy;
  cfg["line_length"] = a.line_length;
  cfg["length_fraction"] = a.length_fraction;
  cfg["y_offset"] = a.y_offset;
  if (opt.material_seed) {
    cfg["material_seed"] = to_json(*opt.material_seed);
    cfg["material_length"] = a.material_length;
    cfg["markers"] = a.markers;
  }
  cfg["snapshots"] = !a.no_snapshots;
  m.config = cfg;
  m.finished = utc_timestamp();
  write_manifest(dir, m);

  const auto& rows = res.timeline.rows;
  json j;
  j["command"] = "evolve";
  j["out"] = a.out;
  j["rows"] = rows.size();
  j["t_final"] = rows.back().t;
  j["Omega_initial"] = rows.front().Omega;
  j["Omega_final"] = rows.back().Omega;
  j["bkm_integral"] = rows.back().bkm_integral;
  j["energy_drift"] = std::abs(rows.back().energy - rows.front().energy) / rows.front().energy;
  j["max_spectral_divergence"] = res.max_spectral_divergence;
  j["timeline_sha256"] = sha256_file(dir / "timeline.csv");
  emit(out, j);
  return kExitOk;
}

// ---- trace, line-diag, check-lemma1 ----

struct LineArgs {
  std::string omega;
  std::string u;
  std::string seed;
  double length = 1.0;
  double step = 0.0;
  int direction = 1;
  bool through = false;
  std::string csv;
  double tol = 1e-5;
  double tau_factor = 10.0;
};

struct TracedLine {
  FlowGeometry geo;
  VortexLine line;
  LineDiagnostics diag;
};

TracedLine trace_from_args(const LineArgs& a) {
  require_file(a.omega, "--omega");
  if (a.seed.empty()) throw ConfigError("--seed is required");
  const VectorField3 omega = load_vorticity(a.omega);
  VectorField3 u;
  if (a.u.empty()) {
    u = velocity_from_vorticity(omega);
  } else {
    require_file(a.u, "--u");
    u = load_velocity(a.u);
  }
  TracedLine t{FlowGeometry::build(omega, u), {}, {}};
  const Vec3 seed = parse_vec3(a.seed, "--seed");
  const double h = a.step > 0.0 ? a.step : default_step(omega.grid);
  t.line = a.through ? trace_through(t.geo.xi, seed, a.length, h)
                     : trace_line(t.geo.xi, seed, a.length, h, a.direction);
  t.diag = line_diagnostics(t.line, t.geo);
  return t;
}

json diag_json(const LineDiagnostics& d) {
  json j;
  j["arc_length"] = d.arc_length;
  j["max_omega"] = d.max_omega;
  j["M_line"] = d.M_line;
  j["div_integral"] = d.div_integral;
  j["abs_div_integral"] = d.abs_div_integral;
  j["U_xi"] = d.U_xi_line;
  j["U_n"] = d.U_n_line;
  return j;
}

int cmd_trace(const LineArgs& a, std::ostream& out) {
  const TracedLine t = trace_from_args(a);
  if (!a.csv.empty()) {
    auto os = open_out(a.csv);
    write_line_csv(os, t.line);
  }
  json j;
  j["command"] = "trace";
  j["seed"] = to_json(t.line.seed);
  j["samples"] = t.line.samples.size();
  j["step"] = t.line.step;
  j["length"] = t.line.length();
  j["terminated"] = to_string(t.line.terminated_reason);
  j["start"] = to_json(t.line.samples.front().position);
  j["end"] = to_json(t.line.samples.back().position);
  if (!a.csv.empty()) j["csv"] = a.csv;
  emit(out, j);
  return kExitOk;
}

int cmd_line_diag(const LineArgs& a, std::ostream& out) {
  const TracedLine t = trace_from_args(a);
  json j;
  j["command"] = "line-diag";
  j["seed"] = to_json(t.line.seed);
  j["terminated"] = to_string(t.line.terminated_reason);
  j["diagnostics"] = diag_json(t.diag);
  emit(out, j);
  return kExitOk;
}

int cmd_check_lemma1(const LineArgs& a, std::ostream& out) {
  const TracedLine t = trace_from_args(a);
  const LemmaOneReport rep = check_lemma1(t.line);
  const CorridorCheck cor = ratio_corridor(rep, a.tau_factor);
  const bool pass = rep.max_rel_residual <= a.tol && cor.holds;
  json j;
  j["command"] = "check-lemma1";
  j["seed"] = to_json(t.line.seed);
  j["length"] = t.line.length();
  j["samples"] = t.line.samples.size();
  j["terminated"] = to_string(t.line.terminated_reason);
  j["residual"] = rep.max_rel_residual;
  j["tol"] = a.tol;
  j["corridor"] = {{"holds", cor.holds}, {"tau", cor.tau}, {"worst_slack", cor.worst_slack}};
  j["pass"] = pass;
  emit(out, j);
  return pass ? kExitOk : kExitCheckFailed;
}

// ---- check-lemma2 ----

struct Lemma2Args {
  std::string run;
  std::string seed;
  double length = 1.0;
  int markers = kDefaultMarkers;
  double dt = 1e-3;
  double tol = 1e-3;
  double stretch_tol = 1e-2;
};

int cmd_check_lemma2(const Lemma2Args& a, std::ostream& out) {
  const fs::path dir = a.run;
  const RunManifest m = read_manifest(dir);
  if (m.snapshots.size() < 2) throw ConfigError("check-lemma2: run needs at least two snapshots");
  std::vector<double> times;
  std::vector<VectorField3> fields;
  for (const auto& s : m.snapshots) {
    times.push_back(s.t);
    fields.push_back(read_vlf_vector(dir / s.path));
  }
  std::vector<FlowGeometry> geos;
  geos.reserve(fields.size());
  for (const auto& u : fields) geos.push_back(FlowGeometry::build(curl(u), u));

  const Vec3 seed = a.seed.empty() ? find_max_vorticity_point(geos.front().omega_mag).point
                                   : parse_vec3(a.seed, "--seed");
  MaterialLine line = seed_material_line(geos.front().xi, seed, a.length, a.markers, times.front());
  const VelocityProvider provider = snapshot_provider(times, fields);
  std::vector<MaterialLineStats> history{measure_material_line(line, geos.front())};
  for (std::size_t k = 1; k < times.size(); ++k) {
    line = track_material_line(line, provider, times[k], a.dt);
    history.push_back(measure_material_line(line, geos[k]));
  }
  const LemmaTwoReport l2 = check_lemma2(line, geos.front().omega, geos.back().omega);
  const StretchingReport st = check_stretching_inequalities(history, a.stretch_tol);
  const bool pass = l2.max_residual <= a.tol && st.holds;

  json j;
  j["command"] = "check-lemma2";
  j["run"] = a.run;
  j["seed"] = to_json(seed);
  j["t1"] = times.front();
  j["t"] = times.back();
  j["markers"] = line.current_points.size();
  j["excluded"] = l2.excluded.size();
  j["spacing_warning"] = line.spacing_warning;
  j["residual"] = l2.max_residual;
  j["mean_residual"] = l2.mean_residual;
  j["tol"] = a.tol;
  j["stretching"] = {{"holds", st.holds},
                     {"tolerance", st.tolerance},
                     {"worst_omega_margin", st.worst_omega_margin},
                     {"worst_length_margin", st.worst_length_margin},
                     {"worst_growth_margin", st.worst_growth_margin}};
  j["pass"] = pass;
  emit(out, j);
  return pass ? kExitOk : kExitCheckFailed;
}

// ---- biot-savart, check-35 ----

int cmd_biot_savart(const std::string& field, const std::string& at, std::ostream& out) {
  require_file(field, "--field");
  if (at.empty()) throw ConfigError("--at is required");
  const VectorField3 omega = load_vorticity(field);
  const Vec3 x = parse_vec3(at, "--at");
  const Vec3 direct = bs_velocity(omega, x);
  const Vec3 spectral = sample(bs_spectral_invert(omega), x, Interpolation::quintic);
  json j;
  j["command"] = "biot-savart";
  j["at"] = to_json(x);
  j["u_direct"] = to_json(direct);
  j["u_spectral"] = to_json(spectral);
  j["relative_difference"] = (direct - spectral).norm() / std::max(direct.norm(), 1e-300);
  emit(out, j);
  return kExitOk;
}

int cmd_check_35(const std::string& u_path, const std::string& omega_path, double u_l2, std::ostream& out) {
  require_file(u_path, "--u");
  const VectorField3 u = load_velocity(u_path);
  VectorField3 omega;
  if (omega_path.empty()) {
    omega = curl(u);
  } else {
    require_file(omega_path, "--omega");
    omega = load_vorticity(omega_path);
  }
  const VelocityBoundReport r = check_35_bound(u, omega, u_l2);
  json j;
  j["command"] = "check-35";
  j["U_measured"] = r.U_measured;
  j["Omega"] = r.Omega;
  j["u_l2"] = r.u_l2;
  j["rho"] = r.rho_used;
  j["bound"] = r.bound_value;
  j["ratio"] = r.ratio;
  j["pass"] = r.pass;
  emit(out, j);
  return r.pass ? kExitOk : kExitCheckFailed;
}

// ---- theorem checks ----

int cmd_check_thm1(const std::string& timeline, double budget, std::ostream& out) {
  if (timeline.empty()) throw ConfigError("--timeline is required");
  fs::path p = timeline;
  if (fs::is_directory(p)) p /= "line_series.csv";
  if (!fs::is_regular_file(p)) throw ConfigError("check-thm1: no line series at " + p.string());
  auto is = open_in(p);
  const auto series = read_line_series_csv(is);
  const CriterionVerdict v = theorem1_check(series, budget);
  json j;
  j["command"] = "check-thm1";
  j["samples"] = series.size();
  j["budget"] = budget;
  j.update(to_json(v));
  emit(out, j);
  return verdict_exit(v.verdict);
}

struct ScenarioArgs {
  std::string preset;
  bool list = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double gamma = 1.0;
  double C0 = kDefaultC0;
  double c0 = kDefaultSmallC0;
  double t1_gap = 0.01;
  double T = 1.0;
  int k_max = 64;
};

ScalingScenario scenario_from_args(const ScenarioArgs& a, CLI::App* sub) {
  ScalingScenario s;
  if (!a.preset.empty()) {
    s = scenario_preset(a.preset);
    if (sub->count("--alpha")) s.alpha = a.alpha;
    if (sub->count("--beta")) s.beta = a.beta;
  } else {
    if (std::isnan(a.alpha) || std::isnan(a.beta)) throw ConfigError("give --preset or both --alpha and --beta");
    s.name = "custom";
    s.alpha = a.alpha;
    s.beta = a.beta;
  }
  if (sub->count("--gamma")) s.gamma = a.gamma;
  if (sub->count("--C0")) s.C0 = a.C0;
  if (sub->count("--c0")) s.c0 = a.c0;
  s.validate();
  return s;
}

json verdict_line(const char* command, const ScalingScenario& s, const CriterionVerdict& v) {
  json j;
  j["command"] = command;
  j["scenario"] = to_json(s);
  j.update(to_json(v));
  return j;
}

int cmd_check_thm2(const ScenarioArgs& a, CLI::App* sub, std::ostream& out) {
  const ScalingScenario s = scenario_from_args(a, sub);
  const CriterionVerdict v = theorem2_check(s);
  emit(out, verdict_line("check-thm2", s, v));
  return verdict_exit(v.verdict);
}

int cmd_scenario(const ScenarioArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& s : scenario_library()) emit(out, verdict_line("scenario", s, theorem2_check(s)));
    return kExitOk;
  }
  if (a.preset.empty()) throw ConfigError("scenario: give --preset or --list");
  const ScalingScenario s = scenario_preset(a.preset);
  const CriterionVerdict v = theorem2_check(s);
  emit(out, verdict_line("scenario", s, v));
  return verdict_exit(v.verdict);
}

int cmd_replay(const ScenarioArgs& a, CLI::App* sub, std::ostream& out) {
  const ScalingScenario s = scenario_from_args(a, sub);
  if (!(a.t1_gap > 0.0)) throw ConfigError("replay: --t1-gap must be > 0");
  const double t1 = a.T - a.t1_gap;
  json j;
  j["command"] = "replay";
  j["scenario"] = to_json(s);
  ReplayReport r;
  try {
    r = contradiction_replay(s, t1, a.T, {}, a.k_max);
  } catch (const DomainError& e) {
    const std::string what = e.what();
    if (what.rfind("proof machinery inapplicable", 0) != 0) throw;
    j["applicable"] = false;
    j["notes"] = json::array({what});
    emit(out, j);
    return kExitCheckFailed;
  }
  j["applicable"] = true;
  j["r"] = r.sequence.r;
  j["delta"] = r.sequence.delta;
  j["x"] = r.x;
  j["rx"] = r.series.ratio;
  j["series_converges"] = r.series.converges;
  j["t1_close_enough"] = r.t1_close_enough;
  j["t_k"] = r.sequence.tks;
  j["gaps"] = r.sequence.gaps;
  j["bound"] = r.bound;
  j["first_violation_k"] = r.first_violation_k ? json(*r.first_violation_k) : json(nullptr);
  j["resolution_limited"] = r.sequence.resolution_limited;
  j["contradiction_demonstrated"] = r.contradiction_demonstrated;
  j["notes"] = r.notes;
  emit(out, j);
  return kExitOk;
}

// ---- report ----

std::string fit_cell(const ExponentFit& f) {
  return f.defined ? fmt17(f.value) + " +- " + fmt17(f.half_width) : "undefined";
}

std::string fit_csv(const ExponentFit& f) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return fmt17(f.defined ? f.value : nan) + "," + fmt17(f.defined ? f.half_width : nan);
}

inline constexpr double kSteadyTol = 1e-6;

int cmd_report(const std::string& run, double T_est_arg, std::ostream& out) {
  if (run.empty()) throw ConfigError("--run is required");
  const fs::path dir = run;
  const RunManifest m = read_manifest(dir);
  if (!fs::is_regular_file(dir / "timeline.csv")) throw ConfigError("report: missing timeline.csv in " + run);
  auto is = open_in(dir / "timeline.csv");
  const DiagnosticsTimeline tl = read_timeline_csv(is);
  if (tl.rows.empty()) throw ConfigError("report: empty timeline");
  const auto& rows = tl.rows;

  const double W0 = rows.front().Omega;
  double max_var = 0.0, max_ml = 0.0;
  for (const auto& r : rows) {
    max_var = std::max(max_var, std::abs(r.Omega - W0) / W0);
    max_ml = std::max(max_ml, r.ML_product);
  }
  const bool steady = max_var <= kSteadyTol;
  const double T_est = T_est_arg > 0.0 ? T_est_arg : 1.1 * rows.back().t;

  ScalingFit fit;
  std::string fit_error;
  try {
    fit = fit_scaling(tl, T_est);
  } catch (const DomainError& e) {
    fit_error = e.what();
  }
  const bool fitted = fit_error.empty();

  {
    auto os = open_out(dir / "summary.csv");
    os << "quantity,value\n";
    os << "rows," << rows.size() << '\n';
    os << "t_first," << fmt17(rows.front().t) << '\n';
    os << "t_last," << fmt17(rows.back().t) << '\n';
    os << "Omega_first," << fmt17(W0) << '\n';
    os << "Omega_last," << fmt17(rows.back().Omega) << '\n';
    os << "Omega_growth," << fmt17(rows.back().Omega / W0) << '\n';
    os << "Omega_max_rel_variation," << fmt17(max_var) << '\n';
    os << "bkm_integral," << fmt17(rows.back().bkm_integral) << '\n';
    os << "ML_product_max," << fmt17(max_ml) << '\n';
    os << "T_est," << fmt17(T_est) << '\n';
  }
  {
    auto os = open_out(dir / "exponents.csv");
    os << "T_est,alpha,alpha_half_width,beta,beta_half_width,gamma,gamma_half_width\n";
    if (fitted) {
      for (const auto& s : fit.sensitivity) {
        os << fmt17(s.T_est) << ',' << fit_csv(s.alpha) << ',' << fit_csv(s.beta) << ',' << fit_csv(s.gamma) << '\n';
      }
    }
  }
  {
    auto os = open_out(dir / "report.md");
    os << "# Run report: " << run << "\n\n";
    os << "Command: `" << m.command << "`, tool " << m.tool_version << ", format " << m.format_version << ".\n\n";
    os << "## Vorticity growth\n\n";
    os << "| quantity | value |\n|---|---|\n";
    os << "| rows | " << rows.size() << " |\n";
    os << "| t range | " << fmt17(rows.front().t) << " .. " << fmt17(rows.back().t) << " |\n";
    os << "| Omega first | " << fmt17(W0) << " |\n";
    os << "| Omega last | " << fmt17(rows.back().Omega) << " |\n";
    os << "| max relative variation of Omega | " << fmt17(max_var) << " |\n";
    os << "| BKM integral | " << fmt17(rows.back().bkm_integral) << " |\n";
    os << "| max M L | " << fmt17(max_ml) << " |\n\n";
    if (steady) {
      os << "Omega constant within tolerance " << fmt17(kSteadyTol) << ".\n\n";
    } else {
      os << "Omega changes by a factor " << fmt17(rows.back().Omega / W0) << " over the run.\n\n";
    }
    os << "## Fitted exponents\n\n";
    if (!fitted) {
      os << "Fit skipped: " << fit_error << "\n";
    } else {
      os << "Fit window ends at T_est = " << fmt17(T_est) << ", " << fit.rows_used << " rows.\n\n";
      os << "| T_est | alpha | beta | gamma |\n|---|---|---|---|\n";
      for (const auto& s : fit.sensitivity) {
        os << "| " << fmt17(s.T_est) << " | " << fit_cell(s.alpha) << " | " << fit_cell(s.beta) << " | "
           << fit_cell(s.gamma) << " |\n";
      }
      os << '\n' << (fit.inconclusive ? "Fit inconclusive:" : "Fit conclusive.") << '\n';
      for (const auto& r : fit.reasons) os << "- " << r << '\n';
    }
  }

  json j;
  j["command"] = "report";
  j["run"] = run;
  j["rows"] = rows.size();
  j["Omega_growth"] = rows.back().Omega / W0;
  j["Omega_max_rel_variation"] = max_var;
  j["Omega_constant"] = steady;
  j["bkm_integral"] = rows.back().bkm_integral;
  j["ML_product_max"] = max_ml;
  j["T_est"] = T_est;
  if (fitted) {
    auto fj = [](const ExponentFit& f) { return f.defined ? json({f.value, f.half_width}) : json(nullptr); };
    j["alpha_hat"] = fj(fit.alpha_hat);
    j["beta_hat"] = fj(fit.beta_hat);
    j["gamma_hat"] = fj(fit.gamma_hat);
    j["fit_inconclusive"] = fit.inconclusive;
    j["fit_reasons"] = fit.reasons;
  } else {
    j["fit_error"] = fit_error;
  }
  j["files"] = json::array({"report.md", "summary.csv", "exponents.csv"});
  emit(out, j);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vortex-line geometry toolkit for 3-D incompressible Euler flow", "vld"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", kToolVersion);

  GenArgs gen;
  auto* s_gen = app.add_subcommand("gen", "generate an initial field as a VLF1 file");
  add_field_options(s_gen, gen);
  s_gen->add_option("--out", gen.out, "output file")->required();
  s_gen->add_flag("--omega", gen.omega, "write the vorticity instead of the velocity");

  EvolveArgs ev;
  auto* s_ev = app.add_subcommand("evolve", "run the Euler solver with vortex-line diagnostics");
  add_field_options(s_ev, ev.init);
  s_ev->remove_option(s_ev->get_option("--kind"));
  s_ev->add_option("--init", ev.init_kind, "analytic initial field")
      ->check(CLI::IsMember({"abc", "tg", "tubes", "shear", "random", "ring"}));
  s_ev->add_option("--init-file", ev.init_file, "initial velocity or vorticity file");
  s_ev->add_option("--dt", ev.dt, "time step")->capture_default_str();
  s_ev->add_option("--t-end", ev.t_end, "final time")->capture_default_str();
  s_ev->add_option("--every", ev.every, "steps between diagnostic rows")->capture_default_str();
  s_ev->add_option("--cfl", ev.cfl, "CFL limit")->capture_default_str();
  s_ev->add_flag("--filter", ev.filter, "apply the exponential spectral filter");
  s_ev->add_option("--out", ev.out, "run directory")->capture_default_str();
  s_ev->add_option("--seed-policy", ev.seed_policy, "argmax, fraction or lagrangian")
      ->check(CLI::IsMember({"argmax", "fraction", "lagrangian"}))
      ->capture_default_str();
  s_ev->add_option("--line-length", ev.line_length, "traced line length")->capture_default_str();
  s_ev->add_option("--length-fraction", ev.length_fraction, "line length as a fraction of the box")
      ->capture_default_str();
  s_ev->add_option("--y-offset", ev.y_offset, "second line point, as a signed fraction of the line length")
      ->capture_default_str();
  s_ev->add_option("--material-seed", ev.material_seed, "seed x,y,z of a co-advected material line");
  s_ev->add_option("--material-length", ev.material_length, "material line length")->capture_default_str();
  s_ev->add_option("--markers", ev.markers, "material line markers")->capture_default_str();
  s_ev->add_flag("--no-snapshots", ev.no_snapshots, "do not write velocity snapshots");

  LineArgs tr, ld, l1;
  auto line_opts = [](CLI::App* sub, LineArgs& a) {
    sub->add_option("--omega", a.omega, "vorticity (or velocity) file")->required();
    sub->add_option("--u", a.u, "velocity file (default: inverted from --omega)");
    sub->add_option("--seed", a.seed, "seed point x,y,z")->required();
    sub->add_option("--length", a.length, "line length")->capture_default_str();
    sub->add_option("--step", a.step, "arc-length step (default: a quarter of the grid spacing)");
    sub->add_option("--direction", a.direction, "+1 or -1")->check(CLI::IsMember({1, -1}))->capture_default_str();
    sub->add_flag("--through", a.through, "trace both ways, centred on the seed");
  };
  auto* s_tr = app.add_subcommand("trace", "trace one vortex line");
  line_opts(s_tr, tr);
  s_tr->add_option("--csv", tr.csv, "write the samples to this CSV file");
  auto* s_ld = app.add_subcommand("line-diag", "along-line diagnostics of one vortex line");
  line_opts(s_ld, ld);
  auto* s_l1 = app.add_subcommand("check-lemma1", "magnitude identity along a vortex line");
  line_opts(s_l1, l1);
  s_l1->add_option("--tol", l1.tol, "residual tolerance")->capture_default_str();
  s_l1->add_option("--tau-factor", l1.tau_factor, "corridor width as a multiple of the residual")
      ->capture_default_str();

  Lemma2Args l2;
  auto* s_l2 = app.add_subcommand("check-lemma2", "stretching identity on a material line of a run");
  s_l2->add_option("--run", l2.run, "run directory")->required();
  s_l2->add_option("--seed", l2.seed, "seed x,y,z (default: vorticity maximum of the first snapshot)");
  s_l2->add_option("--length", l2.length, "line length")->capture_default_str();
  s_l2->add_option("--markers", l2.markers, "markers")->capture_default_str();
  s_l2->add_option("--dt", l2.dt, "particle time step")->capture_default_str();
  s_l2->add_option("--tol", l2.tol, "identity tolerance")->capture_default_str();
  s_l2->add_option("--stretch-tol", l2.stretch_tol, "inequality tolerance factor")->capture_default_str();

  std::string bs_field, bs_at;
  auto* s_bs = app.add_subcommand("biot-savart", "free-space and periodic velocity at a point");
  s_bs->add_option("--field", bs_field, "vorticity file")->required();
  s_bs->add_option("--at", bs_at, "point x,y,z")->required();

  std::string c35_u, c35_w;
  double c35_l2 = 0.0;
  auto* s_35 = app.add_subcommand("check-35", "cutoff velocity bound U <= C Omega^{3/5}");
  s_35->add_option("--u", c35_u, "velocity file")->required();
  s_35->add_option("--omega", c35_w, "vorticity file (default: curl of --u)");
  s_35->add_option("--u-l2", c35_l2, "reference L2 norm (0: measure)")->capture_default_str();

  std::string t1_timeline;
  double t1_budget = kDefaultBudgetC;
  auto* s_t1 = app.add_subcommand("check-thm1", "line-integral budget check on a run");
  s_t1->add_option("--timeline", t1_timeline, "run directory or line_series.csv")->required();
  s_t1->add_option("--budget", t1_budget, "budget C")->capture_default_str();

  ScenarioArgs t2, sc, rp;
  auto scen_opts = [](CLI::App* sub, ScenarioArgs& a) {
    sub->add_option("--alpha", a.alpha, "velocity exponent");
    sub->add_option("--beta", a.beta, "length exponent");
    sub->add_option("--gamma", a.gamma, "vorticity exponent")->capture_default_str();
    sub->add_option("--C0", a.C0, "constant C0 (placeholder default)")->capture_default_str();
    sub->add_option("--c0", a.c0, "constant c0 (placeholder default)")->capture_default_str();
  };
  auto* s_t2 = app.add_subcommand("check-thm2", "scaling conditions for a scenario");
  scen_opts(s_t2, t2);
  s_t2->add_option("--preset", t2.preset, "pelz, cfm, cf or kerr");
  auto* s_sc = app.add_subcommand("scenario", "verdicts for the built-in scenarios");
  s_sc->add_option("--preset", sc.preset, "pelz, cfm, cf or kerr");
  s_sc->add_flag("--list", sc.list, "list every preset");
  auto* s_rp = app.add_subcommand("replay", "replay the doubling-sequence argument on a power-law model");
  scen_opts(s_rp, rp);
  s_rp->add_option("--preset", rp.preset, "pelz, cfm, cf or kerr");
  s_rp->add_option("--t1-gap", rp.t1_gap, "T - t1")->capture_default_str();
  s_rp->add_option("--T", rp.T, "blow-up time of the model")->capture_default_str();
  s_rp->add_option("--k-max", rp.k_max, "sequence length")->capture_default_str();

  std::string rep_run;
  double rep_T = 0.0;
  auto* s_rep = app.add_subcommand("report", "markdown and CSV summary of a run directory");
  s_rep->add_option("--run", rep_run, "run directory")->required();
  s_rep->add_option("--T-est", rep_T, "assumed singular time (default: 1.1 x last time)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (s_gen->parsed()) return cmd_gen(gen, out);
    if (s_ev->parsed()) return cmd_evolve(ev, args, out);
    if (s_tr->parsed()) return cmd_trace(tr, out);
    if (s_ld->parsed()) return cmd_line_diag(ld, out);
    if (s_l1->parsed()) return cmd_check_lemma1(l1, out);
    if (s_l2->parsed()) return cmd_check_lemma2(l2, out);
    if (s_bs->parsed()) return cmd_biot_savart(bs_field, bs_at, out);
    if (s_35->parsed()) return cmd_check_35(c35_u, c35_w, c35_l2, out);
    if (s_t1->parsed()) return cmd_check_thm1(t1_timeline, t1_budget, out);
    if (s_t2->parsed()) return cmd_check_thm2(t2, s_t2, out);
    if (s_sc->parsed()) return cmd_scenario(sc, out);
    if (s_rp->parsed()) return cmd_replay(rp, s_rp, out);
    if (s_rep->parsed()) return cmd_report(rep_run, rep_T, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace vld
