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
#include <string>
#include <utility>
#include <vector>

#include "vld/diagnostics.hpp"
#include "vld/vortex_line.hpp"

namespace vld {

enum class Verdict { no_blowup_excluded, conditions_violated, inconclusive };
const char* to_string(Verdict v);

/// Outcome of a criterion. `verdict` is no_blowup_excluded exactly when
/// `failed_conditions` is empty.
struct CriterionVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> failed_conditions;
  std::vector<std::pair<std::string, double>> margins;  // positive = satisfied with slack
  std::vector<std::string> notes;
};

// ---------------------------------------------------------------------------
// Pointwise/per-line criterion.

/// One time level: the signed integral of div xi from x(t) to y(t) along
/// the vortex line, |w(x)|/|w(y)|, |w(y)| and the numerical tolerance tau
/// used to widen the ratio corridor.
struct Theorem1Sample {
  double t = 0.0;
  double div_integral = 0.0;
  double abs_div_integral = 0.0;
  double omega_x = 0.0;
  double omega_y = 0.0;
  double endpoint_ratio = 1.0;
  double tau = 0.0;
};

/// Builds a sample from an annotated line: x is sample `x_index`, y lies at
/// the signed arc-length offset `y_offset` from x (clamped to the line).
/// tau is tau_factor times the line's magnitude-identity residual.
Theorem1Sample theorem1_sample(const VortexLine& line, double t, std::size_t x_index, double y_offset,
                               double tau_factor = 10.0);

inline constexpr double kDefaultBudgetC = 10.0;

/// (a) |div_integral| <= C at every time; (b) the trapezoid of |w(y(t))|
/// over t is finite; (c) every endpoint ratio lies in
/// [e^{-C}(1 - tau), e^{C}(1 + tau)].
CriterionVerdict theorem1_check(const std::vector<Theorem1Sample>& series, double C_budget = kDefaultBudgetC);

// ---------------------------------------------------------------------------
// Exponent criterion and the proof's arithmetic.

enum class ScenarioKind { theorem1, theorem2 };

inline constexpr double kDefaultC0 = 2.718281828459045;  // placeholder, non-normative
inline constexpr double kDefaultSmallC0 = 0.5;           // placeholder c0, non-normative

/// Claimed blow-up scaling: U_xi + U_n M L ~ (T-t)^-alpha, L ~ (T-t)^beta,
/// Omega ~ (T-t)^-gamma, M L <= C0 and Omega_L >= c0 Omega.
struct ScalingScenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::theorem2;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  double C0 = kDefaultC0;
  double c0 = kDefaultSmallC0;
  std::string note;

  /// Throws DomainError unless beta >= 0, C0 > 0 and c0 in (0, 1].
  void validate() const;
};

/// Conditions alpha in (0,1), C0 finite, beta < 1 - alpha. Alpha outside
/// the open interval gives `inconclusive`; a Theorem-1-type scenario is
/// never judged by this check.
CriterionVerdict theorem2_check(const ScalingScenario& s);

/// delta = ((1 - alpha) / beta - 1) / 2; throws DomainError for beta <= 0.
double delta_exponent(double alpha, double beta);

struct SequenceModel {
  double r = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double t1 = 0.0;
  double T = 0.0;
  std::vector<double> tks;     // t_1, t_2, ...
  std::vector<double> gaps;    // T - t_k, computed without cancellation
  std::vector<double> omegas;  // Omega(t_k)
  bool bounded = false;        // stopped because the model never reached r Omega(t_k)
  bool resolution_limited = false;  // some t_k is the closest double, short of 1e-12
};

/// t_{k+1} solves Omega(t_{k+1}) = r Omega(t_k) by bisection in t, to
/// |Omega(t_{k+1}) - r Omega(t_k)| <= 1e-12 Omega(t_k) or to adjacent
/// doubles when t cannot resolve that (flagged). Stops at
/// k_max terms, when the gap falls below 1e-15, or when Omega stays below
/// the target all the way to T. Throws DomainError for r <= 1 or t1 >= T and
/// NumericalError when the model is not increasing on probe points.
SequenceModel build_doubling_sequence(const std::function<double(double)>& omega_model, double r, double t1,
                                      double T, int k_max = 64);

struct SeriesVerdict {
  bool converges = false;
  double ratio = 0.0;                // r x
  std::vector<double> partial_sums;  // S_K = sum_{k=0}^{K} (r x)^k, K = 0..64
};

/// Geometric series sum (r x)^k: converges iff r x < 1.
SeriesVerdict series_verdict(double r, double x);

struct ReplayReport {
  ScalingScenario scenario;
  SequenceModel sequence;
  double x = 0.0;  // (T - t1)^delta
  SeriesVerdict series;
  std::vector<double> bound;  // (T - t1)^{1 + k delta} for T - t_{k+1}
  std::optional<int> first_violation_k;  // first k with model gap above the bound
  std::vector<double> model_sum;  // partial sums of r^k (T - t_{k+1})
  bool t1_close_enough = false;   // r x < 1
  bool contradiction_demonstrated = false;
  std::vector<std::string> notes;
};

/// Replays the doubling argument on Omega(t) = (T - t)^-gamma (or a given
/// model): builds the sequence with r = e^{2 C0}/c0 + 1, compares the actual
/// gaps T - t_{k+1} with (T - t1)^{1 + k delta} and evaluates the series at
/// x = (T - t1)^delta. Throws DomainError("proof machinery inapplicable")
/// unless the scenario passes theorem2_check.
ReplayReport contradiction_replay(const ScalingScenario& s, double t1, double T,
                                  const std::function<double(double)>& omega_model = {}, int k_max = 64);

/// Presets: pelz (Theorem-1 type), cfm, cf, kerr.
std::vector<ScalingScenario> scenario_library();
/// Throws ConfigError for an unknown name.
ScalingScenario scenario_preset(const std::string& name);

// ---------------------------------------------------------------------------
// Exponent fits from a timeline.

struct ExponentFit {
  double value = 0.0;
  double half_width = 0.0;  // 1.96 standard errors
  bool defined = false;
};

struct SensitivityRow {
  double T_est = 0.0;
  ExponentFit alpha, beta, gamma;
};

struct ScalingFit {
  double T_est = 0.0;
  std::size_t rows_used = 0;
  ExponentFit alpha_hat, beta_hat, gamma_hat;
  std::vector<SensitivityRow> sensitivity;  // T_est x {0.95, 0.975, 1, 1.025, 1.05}
  bool inconclusive = false;
  std::vector<std::string> reasons;
};

/// Least-squares slopes of log(quantity) against log(T_est - t) over the
/// final half of the rows with t < T_est: gamma from Omega, beta from L,
/// alpha from U_xi + U_n M L. Throws DomainError with fewer than 8 rows.
ScalingFit fit_scaling(const DiagnosticsTimeline& tl, double T_est);

}  // namespace vld
