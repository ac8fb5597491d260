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
#include <vector>

namespace vld {

struct TimelineRow {
  double t = 0.0;
  double Omega = 0.0;
  double bkm_integral = 0.0;
  double energy = 0.0;
  double U_max = 0.0;
  double L_line = 0.0;
  double M_line = 0.0;
  double U_xi = 0.0;
  double U_n = 0.0;
  double ML_product = 0.0;
};

/// Per-diagnostic-step record of a run. bkm_integral is the running
/// trapezoid of the recorded Omega values.
struct DiagnosticsTimeline {
  std::vector<TimelineRow> rows;

  /// Appends a row and fills its bkm_integral from the previous row.
  void append(TimelineRow row);
  /// Throws NumericalError unless t is strictly increasing and the BKM
  /// integral matches the trapezoid of Omega bit for bit.
  void validate() const;
};

inline constexpr const char* kTimelineHeader = "t,Omega,bkm_integral,energy,U_max,L_line,M_line,U_xi,U_n,ML_product";

void write_timeline_csv(std::ostream& os, const DiagnosticsTimeline& tl);
/// Parses the CSV written by write_timeline_csv; throws ConfigError on a
/// wrong header or malformed row.
DiagnosticsTimeline read_timeline_csv(std::istream& is);

}  // namespace vld
