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
#include "vld/diagnostics.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vld/error.hpp"
#include "vld/format.hpp"

namespace vld {

void DiagnosticsTimeline::append(TimelineRow row) {
  if (rows.empty()) {
    row.bkm_integral = 0.0;
  } else {
    const TimelineRow& prev = rows.back();
    if (!(row.t > prev.t)) throw NumericalError("timeline: time must be strictly increasing");
    row.bkm_integral = prev.bkm_integral + 0.5 * (row.t - prev.t) * (row.Omega + prev.Omega);
  }
  rows.push_back(row);
}

void DiagnosticsTimeline::validate() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const TimelineRow& a = rows[k - 1];
    const TimelineRow& b = rows[k];
    if (!(b.t > a.t)) throw NumericalError("timeline: time not strictly increasing at row " + std::to_string(k));
    const double expect = a.bkm_integral + 0.5 * (b.t - a.t) * (b.Omega + a.Omega);
    if (b.bkm_integral != expect) {
      throw NumericalError("timeline: bkm_integral is not the trapezoid of Omega at row " + std::to_string(k));
    }
  }
}

void write_timeline_csv(std::ostream& os, const DiagnosticsTimeline& tl) {
  os << kTimelineHeader << '\n';
  for (const auto& r : tl.rows) {
    os << fmt17(r.t) << ',' << fmt17(r.Omega) << ',' << fmt17(r.bkm_integral) << ',' << fmt17(r.energy) << ','
       << fmt17(r.U_max) << ',' << fmt17(r.L_line) << ',' << fmt17(r.M_line) << ',' << fmt17(r.U_xi) << ','
       << fmt17(r.U_n) << ',' << fmt17(r.ML_product) << '\n';
  }
}

DiagnosticsTimeline read_timeline_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("timeline: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTimelineHeader) throw ConfigError("timeline: unexpected header '" + line + "'");
  DiagnosticsTimeline tl;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[10];
    std::istringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n >= 10) throw ConfigError("timeline: too many columns on line " + std::to_string(lineno));
      try {
        std::size_t used = 0;
        v[n] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("timeline: bad number '" + cell + "' on line " + std::to_string(lineno));
      }
      ++n;
    }
    if (n != 10) throw ConfigError("timeline: expected 10 columns on line " + std::to_string(lineno));
    tl.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
  }
  return tl;
}

}  // namespace vld
