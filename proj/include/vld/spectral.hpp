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

#include <complex>
#include <memory>

#include "vld/grid.hpp"

namespace vld {

using Complex = std::complex<double>;
using SpectralArray = Eigen::ArrayXcd;
using SpectralVector = std::array<SpectralArray, 3>;

/// Real-to-complex FFT machinery for one grid: plans, wavenumbers and the
/// spectral forms of the differential operators.
///
/// Spectral arrays hold the non-redundant half spectrum, kx fastest:
/// index = i + (nx/2+1) * (j + ny * k). Derivative wavenumbers have the
/// Nyquist entry set to zero on every axis, so odd derivatives of real
/// fields stay real and the divergence/projection pair is exactly consistent.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid3& grid);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  /// Shared instance for a grid; plans are created once per shape.
  static std::shared_ptr<const SpectralOps> for_grid(const Grid3& grid);

  const Grid3& grid() const { return grid_; }
  Index spectral_size() const { return nxh_ * Index(grid_.ny) * grid_.nz; }
  int nx_half() const { return int(nxh_); }

  SpectralArray forward(const Eigen::ArrayXd& real) const;
  /// Normalized inverse: inverse(forward(f)) == f to rounding.
  Eigen::ArrayXd inverse(const SpectralArray& spec) const;
  SpectralVector forward(const VectorField3& v) const;
  VectorField3 inverse(const SpectralVector& s) const;

  const Eigen::ArrayXd& kx() const { return kx_; }
  const Eigen::ArrayXd& ky() const { return ky_; }
  const Eigen::ArrayXd& kz() const { return kz_; }
  /// |k|^2 with derivative wavenumbers.
  const Eigen::ArrayXd& k2() const { return k2_; }
  /// Signed integer mode numbers of a spectral index.
  std::array<int, 3> mode(Index spectral_index) const;
  /// 2/3-rule mask: true where every |mode_i| < n_i / 3.
  const Mask& dealias_mask() const { return dealias_; }

  SpectralVector curl(const SpectralVector& v) const;
  SpectralArray divergence(const SpectralVector& v) const;
  SpectralVector gradient(const SpectralArray& s) const;
  /// Leray projection in place; the k = 0 mode is kept.
  void project(SpectralVector& v) const;
  void apply_dealias(SpectralVector& v) const;

 private:
  Grid3 grid_;
  Index nxh_;
  void* plan_r2c_ = nullptr;
  void* plan_c2r_ = nullptr;
  Eigen::ArrayXd kx_, ky_, kz_, k2_;
  Mask dealias_;
};

/// Spectral curl; each output component is mean-free.
VectorField3 curl(const VectorField3& v);
ScalarField3 divergence(const VectorField3& v);
VectorField3 gradient(const ScalarField3& s);
/// Spectral Leray projection onto divergence-free fields (mean kept).
VectorField3 solenoidal_project(const VectorField3& v);

}  // namespace vld
