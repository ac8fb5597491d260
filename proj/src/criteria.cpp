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
#include "vld/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vld/error.hpp"
#include "vld/format.hpp"

namespace vld {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no_blowup_excluded:
      return "no_blowup_excluded";
    case Verdict::conditions_violated:
      return "conditions_violated";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Theorem1Sample theorem1_sample(const VortexLine& line, double t, std::size_t x_index, double y_offset,
                               double tau_factor) {
  const std::size_t n = line.samples.size();
  if (n < 2) throw DomainError("theorem1_sample: line needs at least two samples");
  if (x_index >= n) throw DomainError("theorem1_sample: x index outside the line");
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = line.direction * line.samples[k].div_xi;
  const CumulativeIntegral ci = cumulative_integral(f, line.step);
  const double sy = std::clamp(line.samples[x_index].s + y_offset, 0.0, line.length());
  const std::size_t y = std::min(n - 1, std::size_t(std::lround(sy / line.step)));
  Theorem1Sample out;
  out.t = t;
  out.div_integral = ci.signed_integral[y] - ci.signed_integral[x_index];
  out.abs_div_integral = std::abs(ci.abs_integral[y] - ci.abs_integral[x_index]);
  out.omega_x = line.samples[x_index].omega_mag;
  out.omega_y = line.samples[y].omega_mag;
  out.endpoint_ratio = line.samples[x_index].omega_mag / out.omega_y;
  out.tau = tau_factor * check_lemma1(line).max_rel_residual;
  return out;
}

CriterionVerdict theorem1_check(const std::vector<Theorem1Sample>& series, double C_budget) {
  if (series.empty()) throw DomainError("theorem1_check: empty series");
  if (!(C_budget >= 0.0)) throw DomainError("theorem1_check: budget must be >= 0");
  CriterionVerdict v;

  double worst = 0.0;
  for (const auto& s : series) worst = std::max(worst, std::abs(s.div_integral));
  const double margin_a = C_budget - worst;
  v.margins.emplace_back("div_integral_budget", margin_a);
  if (!(margin_a >= 0.0)) v.failed_conditions.push_back("|integral of div xi| <= C at every time");

  double integral = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    integral += 0.5 * (series[k].t - series[k - 1].t) * (std::abs(series[k].omega_y) + std::abs(series[k - 1].omega_y));
  }
  v.margins.emplace_back("omega_y_time_integral", integral);
  if (!std::isfinite(integral)) v.failed_conditions.push_back("integral of |omega(y(t))| dt finite");

  const double lo = std::exp(-C_budget), hi = std::exp(C_budget);
  double slack = HUGE_VAL;
  for (const auto& s : series) {
    const double l = lo * (1.0 - s.tau), h = hi * (1.0 + s.tau);
    slack = std::min({slack, std::log(s.endpoint_ratio / l), std::log(h / s.endpoint_ratio)});
  }
  v.margins.emplace_back("ratio_corridor_log_slack", slack);
  if (!(slack >= 0.0)) v.failed_conditions.push_back("endpoint ratios within [e^-C, e^C]");

  v.notes.push_back("corridor [" + fmt17(lo) + ", " + fmt17(hi) + "] widened by the numerical tolerance tau");
  v.verdict = v.failed_conditions.empty() ? Verdict::no_blowup_excluded : Verdict::conditions_violated;
  return v;
}

void ScalingScenario::validate() const {
  if (!(beta >= 0.0)) throw DomainError("scenario: beta must be >= 0");
  if (!(C0 > 0.0)) throw DomainError("scenario: C0 must be > 0");
  if (!(c0 > 0.0 && c0 <= 1.0)) throw DomainError("scenario: c0 must lie in (0, 1]");
}

CriterionVerdict theorem2_check(const ScalingScenario& s) {
  CriterionVerdict v;
  if (s.kind == ScenarioKind::theorem1) {
    v.verdict = Verdict::inconclusive;
    v.failed_conditions.push_back("scenario is Theorem-1 type");
    v.notes.push_back("judged by the per-line integral of div xi, not by exponents");
    if (!s.note.empty()) v.notes.push_back(s.note);
    return v;
  }
  const bool alpha_ok = s.alpha > 0.0 && s.alpha < 1.0;
  const bool c0_ok = std::isfinite(s.C0);
  const bool beta_ok = s.beta < 1.0 - s.alpha;
  v.margins.emplace_back("alpha_lower", s.alpha);
  v.margins.emplace_back("alpha_upper", 1.0 - s.alpha);
  v.margins.emplace_back("C0", s.C0);
  v.margins.emplace_back("beta_gap", (1.0 - s.alpha) - s.beta);
  if (!alpha_ok) v.failed_conditions.push_back("alpha in (0,1)");
  if (!c0_ok) v.failed_conditions.push_back("C0 finite");
  if (!beta_ok) v.failed_conditions.push_back("beta < 1 - alpha");
  if (!alpha_ok) {
    v.verdict = Verdict::inconclusive;
    v.notes.push_back("alpha must lie in the open interval (0,1); boundary values are not extrapolated");
  } else if (!v.failed_conditions.empty()) {
    v.verdict = Verdict::conditions_violated;
  } else {
    v.verdict = Verdict::no_blowup_excluded;
  }
  if (!s.note.empty()) v.notes.push_back(s.note);
  return v;
}

double delta_exponent(double alpha, double beta) {
  if (!(beta > 0.0)) throw DomainError("delta_exponent: beta must be > 0");
  return 0.5 * ((1.0 - alpha) / beta - 1.0);
}

SequenceModel build_doubling_sequence(const std::function<double(double)>& omega_model, double r, double t1,
                                      double T, int k_max) {
  if (!(r > 1.0)) throw DomainError("build_doubling_sequence: r must be > 1");
  if (!(T > t1)) throw DomainError("build_doubling_sequence: t1 must be < T");
  if (k_max < 1) throw DomainError("build_doubling_sequence: k_max must be >= 1");
  const double g1 = T - t1;
  auto omega_at_gap = [&](double g) { return omega_model(T - g); };

  // Probe monotonicity on geometrically spaced gaps.
  double prev = omega_at_gap(g1);
  if (!(prev > 0.0) || !std::isfinite(prev)) throw NumericalError("omega model must be positive at t1");
  for (int j = 1; j <= 64; ++j) {
    const double g = g1 * std::pow(1e-12, j / 64.0);
    const double w = omega_at_gap(g);
    if (!(w >= prev * (1.0 - 1e-14))) throw NumericalError("omega model is not monotone increasing on [t1, T)");
    prev = w;
  }

  SequenceModel m;
  m.r = r;
  m.R = std::nan("");
  m.delta = std::nan("");
  m.t1 = t1;
  m.T = T;
  m.gaps.push_back(g1);
  m.tks.push_back(t1);
  m.omegas.push_back(omega_at_gap(g1));
  while (int(m.gaps.size()) < k_max) {
    const double gk = m.gaps.back();
    if (gk < 1e-15) break;
    const double wk = m.omegas.back();
    const double target = r * wk;
    double lo = 0.5 * gk;  // gap where omega >= target
    while (omega_at_gap(lo) < target) {
      lo *= 0.5;
      if (T - lo == T || lo < 1e-300) {
        m.bounded = true;
        return m;
      }
    }
    // Bisect in t so the model sees exactly the times we record; near T
    // the gap T - t is then exact.
    double t_hi = T - lo;                                // omega >= target
    double t_lo = T - (2.0 * lo > gk ? gk : 2.0 * lo);  // omega < target
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (mid == t_lo || mid == t_hi) break;
      if (omega_model(mid) >= target) {
        t_hi = mid;
      } else {
        t_lo = mid;
      }
    }
    const double elo = std::abs(omega_model(t_lo) - target);
    const double ehi = std::abs(omega_model(t_hi) - target);
    const double tk = ehi < elo ? t_hi : t_lo;
    const double w = omega_model(tk);
    if (std::abs(w - target) > 1e-12 * wk) {
      if (std::nextafter(t_lo, T) < t_hi) {
        throw NumericalError("build_doubling_sequence: cannot solve Omega(t) = r Omega(t_k) to tolerance");
      }
      m.resolution_limited = true;
    }
    const double g = T - tk;
    m.gaps.push_back(g);
    m.tks.push_back(tk);
    m.omegas.push_back(w);
  }
  return m;
}

SeriesVerdict series_verdict(double r, double x) {
  if (!(r > 0.0)) throw DomainError("series_verdict: r must be > 0");
  if (!(x >= 0.0)) throw DomainError("series_verdict: x must be >= 0");
  SeriesVerdict v;
  v.ratio = r * x;
  v.converges = v.ratio < 1.0;
  double term = 1.0, sum = 0.0;
  for (int k = 0; k <= 64; ++k) {
    sum += term;
    v.partial_sums.push_back(sum);
    term *= v.ratio;
  }
  return v;
}

ReplayReport contradiction_replay(const ScalingScenario& s, double t1, double T,
                                  const std::function<double(double)>& omega_model, int k_max) {
  s.validate();
  const CriterionVerdict gate = theorem2_check(s);
  if (gate.verdict != Verdict::no_blowup_excluded) {
    std::string why;
    for (const auto& f : gate.failed_conditions) why += (why.empty() ? "" : "; ") + f;
    throw DomainError("proof machinery inapplicable: " + why);
  }
  if (!(T > t1)) throw DomainError("contradiction_replay: t1 must be < T");
  std::function<double(double)> model = omega_model;
  if (!model) {
    if (!(s.gamma > 0.0)) throw DomainError("contradiction_replay: gamma must be > 0 for the power-law model");
    const double g = s.gamma;
    model = [T, g](double t) { return std::pow(T - t, -g); };
  }
  ReplayReport rep;
  rep.scenario = s;
  const double R = std::exp(2.0 * s.C0);
  const double r = R / s.c0 + 1.0;
  const double delta = delta_exponent(s.alpha, s.beta);
  rep.sequence = build_doubling_sequence(model, r, t1, T, k_max);
  rep.sequence.R = R;
  rep.sequence.delta = delta;
  const double g1 = T - t1;
  rep.x = std::pow(g1, delta);
  rep.series = series_verdict(r, rep.x);
  rep.t1_close_enough = rep.series.converges;

  double sum = 0.0, rk = 1.0;
  for (std::size_t k = 0; k < rep.sequence.gaps.size(); ++k) {
    const double b = g1 * std::pow(rep.x, double(k));
    rep.bound.push_back(b);
    if (k >= 1 && !rep.first_violation_k && rep.sequence.gaps[k] > b * (1.0 + 1e-12)) rep.first_violation_k = int(k);
    sum += rk * rep.sequence.gaps[k];
    rep.model_sum.push_back(sum);
    rk *= r;
  }
  if (!rep.t1_close_enough) {
    rep.notes.push_back("t1 not close enough to T: r (T - t1)^delta = " + fmt17(rep.series.ratio) + " >= 1");
  }
  if (g1 >= 1.0) rep.notes.push_back("T - t1 >= 1: the gap bound (T - t1)^{1 + k delta} does not shrink");
  if (rep.sequence.bounded) rep.notes.push_back("omega model stays bounded: no doubling beyond t_" +
                                                std::to_string(rep.sequence.gaps.size()));
  if (rep.first_violation_k) {
    rep.notes.push_back("model gap T - t_{k+1} exceeds (T - t1)^{1 + k delta} first at k = " +
                        std::to_string(*rep.first_violation_k));
  }
  rep.contradiction_demonstrated = rep.t1_close_enough && rep.first_violation_k.has_value();
  return rep;
}

std::vector<ScalingScenario> scenario_library() {
  std::vector<ScalingScenario> out;
  {
    ScalingScenario s;
    s.name = "pelz";
    s.kind = ScenarioKind::theorem1;
    s.alpha = 0.0;
    s.beta = 0.5;
    s.gamma = 1.0;
    s.note = "tubes of length scale (T-t)^{1/2} with div xi ~ (T-t)^{-1/2}: the integral of div xi over the inner "
             "region stays bounded; the verdict rests on the vorticity outside the tubes";
    out.push_back(s);
  }
  {
    ScalingScenario s;
    s.name = "cfm";
    s.alpha = 0.0;
    s.beta = 0.5;
    s.gamma = 1.0;
    s.note = "bounded velocity gives alpha = 0, on the boundary of the admissible range";
    out.push_back(s);
  }
  {
    ScalingScenario s;
    s.name = "cf";
    s.alpha = 0.5;
    s.beta = 0.0;
    s.gamma = 1.0;
    s.note = "L ~ 1 inside a fixed cube; alpha = 0.5 stands for any algebraic velocity growth below 1";
    out.push_back(s);
  }
  {
    ScalingScenario s;
    s.name = "kerr";
    s.alpha = 0.01;
    s.beta = 0.5;
    s.gamma = 1.0;
    s.note = "U_xi, U_n ~ (T-t)^0 sits at alpha = 0; alpha = 0.01 is a representative interior value";
    out.push_back(s);
  }
  return out;
}

ScalingScenario scenario_preset(const std::string& name) {
  for (const auto& s : scenario_library()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario preset '" + name + "' (expected pelz, cfm, cf or kerr)");
}

namespace {

// Slope of y against x with a 1.96-standard-error half width.
ExponentFit slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
  ExponentFit f;
  const std::size_t n = x.size();
  if (n < 3) return f;
  for (double v : y) {
    if (!std::isfinite(v)) return f;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return f;
  const double b = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (my + b * (x[i] - mx));
    ss += e * e;
  }
  f.value = b;
  f.half_width = 1.96 * std::sqrt(ss / double(n - 2) / sxx);
  f.defined = true;
  return f;
}

ExponentFit negate(ExponentFit f) {
  f.value = -f.value;
  return f;
}

void fit_window(const std::vector<TimelineRow>& rows, double T, ExponentFit& alpha, ExponentFit& beta,
                ExponentFit& gamma) {
  std::vector<double> x, lw, ll, la;
  for (const auto& r : rows) {
    x.push_back(std::log(T - r.t));
    lw.push_back(r.Omega > 0.0 ? std::log(r.Omega) : std::nan(""));
    ll.push_back(r.L_line > 0.0 ? std::log(r.L_line) : std::nan(""));
    const double a = r.U_xi + r.U_n * r.ML_product;
    la.push_back(a > 0.0 ? std::log(a) : std::nan(""));
  }
  gamma = negate(slope_fit(x, lw));
  beta = slope_fit(x, ll);
  alpha = negate(slope_fit(x, la));
}

}  // namespace

ScalingFit fit_scaling(const DiagnosticsTimeline& tl, double T_est) {
  std::vector<TimelineRow> before;
  for (const auto& r : tl.rows) {
    if (r.t < T_est) before.push_back(r);
  }
  if (before.size() < 8) throw DomainError("fit_scaling: need at least 8 rows with t < T_est");
  const std::size_t half = before.size() / 2;
  const std::vector<TimelineRow> window(before.end() - std::ptrdiff_t(half), before.end());

  ScalingFit fit;
  fit.T_est = T_est;
  fit.rows_used = window.size();
  fit_window(window, T_est, fit.alpha_hat, fit.beta_hat, fit.gamma_hat);

  for (std::size_t i = 1; i < window.size(); ++i) {
    if (window[i].Omega < window[i - 1].Omega) {
      fit.inconclusive = true;
      fit.reasons.push_back("Omega is not monotone over the fit window");
      break;
    }
  }
  if (!fit.alpha_hat.defined || !fit.beta_hat.defined || !fit.gamma_hat.defined) {
    fit.inconclusive = true;
    fit.reasons.push_back("an exponent is undefined (non-positive quantity in the fit window)");
  }
  if (fit.gamma_hat.defined && fit.gamma_hat.value - fit.gamma_hat.half_width <= 0.0) {
    fit.inconclusive = true;
    fit.reasons.push_back("no growth of Omega detected");
  }

  double spread = 0.0;
  std::vector<double> gammas;
  for (double f : {0.95, 0.975, 1.0, 1.025, 1.05}) {
    SensitivityRow row;
    row.T_est = T_est * f;
    if (row.T_est > window.back().t) {
      fit_window(window, row.T_est, row.alpha, row.beta, row.gamma);
      if (row.gamma.defined) gammas.push_back(row.gamma.value);
    }
    fit.sensitivity.push_back(row);
  }
  if (gammas.size() < 5) {
    fit.inconclusive = true;
    fit.reasons.push_back("T_est grid reaches into the fit window");
  } else {
    spread = *std::max_element(gammas.begin(), gammas.end()) - *std::min_element(gammas.begin(), gammas.end());
    if (spread > 0.1 * std::max(1.0, std::abs(fit.gamma_hat.value))) {
      fit.inconclusive = true;
      fit.reasons.push_back("gamma changes by " + fmt17(spread) + " over T_est +-5%");
    }
  }
  return fit;
}

}  // namespace vld
