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
#include "vld/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace vld {
namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
FftwBuffer<T> fftw_buffer(Index n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * size_t(n))));
}

double derivative_wavenumber(int i, int n, double l) {
  if (2 * i == n) return 0.0;  // Nyquist
  const int m = (i <= n / 2) ? i : i - n;
  return kTwoPi * m / l;
}

int signed_mode(int i, int n) { return (i <= n / 2) ? i : i - n; }

}  // namespace

SpectralOps::SpectralOps(const Grid3& grid) : grid_(grid), nxh_(grid.nx / 2 + 1) {
  grid_.validate();
  const Index nreal = grid_.size();
  const Index nspec = spectral_size();
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto in = fftw_buffer<double>(nreal);
    auto out = fftw_buffer<fftw_complex>(nspec);
    plan_r2c_ = fftw_plan_dft_r2c_3d(grid_.nz, grid_.ny, grid_.nx, in.get(), out.get(), FFTW_ESTIMATE);
    plan_c2r_ = fftw_plan_dft_c2r_3d(grid_.nz, grid_.ny, grid_.nx, out.get(), in.get(), FFTW_ESTIMATE);
  }
  kx_.resize(nspec);
  ky_.resize(nspec);
  kz_.resize(nspec);
  dealias_.resize(nspec);
  for (int k = 0; k < grid_.nz; ++k) {
    for (int j = 0; j < grid_.ny; ++j) {
      for (int i = 0; i < nxh_; ++i) {
        const Index s = i + nxh_ * (j + Index(grid_.ny) * k);
        kx_[s] = derivative_wavenumber(i, grid_.nx, grid_.lx);
        ky_[s] = derivative_wavenumber(j, grid_.ny, grid_.ly);
        kz_[s] = derivative_wavenumber(k, grid_.nz, grid_.lz);
        const int mx = signed_mode(i, grid_.nx), my = signed_mode(j, grid_.ny), mz = signed_mode(k, grid_.nz);
        dealias_[s] = 3 * std::abs(mx) < grid_.nx && 3 * std::abs(my) < grid_.ny && 3 * std::abs(mz) < grid_.nz;
      }
    }
  }
  k2_ = kx_.square() + ky_.square() + kz_.square();
}

SpectralOps::~SpectralOps() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_r2c_) fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
  if (plan_c2r_) fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
}

std::shared_ptr<const SpectralOps> SpectralOps::for_grid(const Grid3& grid) {
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, int, double, double, double>, std::shared_ptr<const SpectralOps>> cache;
  const auto key = std::make_tuple(grid.nx, grid.ny, grid.nz, grid.lx, grid.ly, grid.lz);
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ops = std::make_shared<const SpectralOps>(grid);
  cache.emplace(key, ops);
  return ops;
}

SpectralArray SpectralOps::forward(const Eigen::ArrayXd& real) const {
  if (real.size() != grid_.size()) throw ConfigError("forward FFT: size mismatch");
  auto in = fftw_buffer<double>(grid_.size());
  auto out = fftw_buffer<fftw_complex>(spectral_size());
  std::memcpy(in.get(), real.data(), sizeof(double) * size_t(grid_.size()));
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), in.get(), out.get());
  SpectralArray spec(spectral_size());
  std::memcpy(static_cast<void*>(spec.data()), out.get(), sizeof(fftw_complex) * size_t(spectral_size()));
  return spec;
}

Eigen::ArrayXd SpectralOps::inverse(const SpectralArray& spec) const {
  if (spec.size() != spectral_size()) throw ConfigError("inverse FFT: size mismatch");
  auto in = fftw_buffer<fftw_complex>(spectral_size());
  auto out = fftw_buffer<double>(grid_.size());
  std::memcpy(in.get(), spec.data(), sizeof(fftw_complex) * size_t(spectral_size()));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_), in.get(), out.get());
  Eigen::ArrayXd real(grid_.size());
  std::memcpy(real.data(), out.get(), sizeof(double) * size_t(grid_.size()));
  real /= double(grid_.size());
  return real;
}

SpectralVector SpectralOps::forward(const VectorField3& v) const {
  require_same_grid(grid_, v.grid, "SpectralOps::forward");
  return {forward(v.comp[0]), forward(v.comp[1]), forward(v.comp[2])};
}

VectorField3 SpectralOps::inverse(const SpectralVector& s) const {
  return VectorField3(grid_, {inverse(s[0]), inverse(s[1]), inverse(s[2])});
}

std::array<int, 3> SpectralOps::mode(Index s) const {
  const int i = int(s % nxh_);
  const int j = int((s / nxh_) % grid_.ny);
  const int k = int(s / (nxh_ * grid_.ny));
  return {i, signed_mode(j, grid_.ny), signed_mode(k, grid_.nz)};
}

SpectralVector SpectralOps::curl(const SpectralVector& v) const {
  const Complex I(0.0, 1.0);
  return {I * (ky_ * v[2] - kz_ * v[1]), I * (kz_ * v[0] - kx_ * v[2]), I * (kx_ * v[1] - ky_ * v[0])};
}

SpectralArray SpectralOps::divergence(const SpectralVector& v) const {
  const Complex I(0.0, 1.0);
  return I * (kx_ * v[0] + ky_ * v[1] + kz_ * v[2]);
}

SpectralVector SpectralOps::gradient(const SpectralArray& s) const {
  const Complex I(0.0, 1.0);
  return {I * kx_ * s, I * ky_ * s, I * kz_ * s};
}

void SpectralOps::project(SpectralVector& v) const {
  const SpectralArray kdotv = kx_ * v[0] + ky_ * v[1] + kz_ * v[2];
  const Eigen::ArrayXd inv_k2 = (k2_ > 0.0).select(k2_.inverse(), 0.0);
  const SpectralArray q = kdotv * inv_k2;
  v[0] -= kx_ * q;
  v[1] -= ky_ * q;
  v[2] -= kz_ * q;
}

void SpectralOps::apply_dealias(SpectralVector& v) const {
  for (auto& c : v) c = dealias_.select(c, Complex(0.0, 0.0));
}

VectorField3 curl(const VectorField3& v) {
  const auto ops = SpectralOps::for_grid(v.grid);
  return ops->inverse(ops->curl(ops->forward(v)));
}

ScalarField3 divergence(const VectorField3& v) {
  const auto ops = SpectralOps::for_grid(v.grid);
  return ScalarField3(v.grid, ops->inverse(ops->divergence(ops->forward(v))));
}

VectorField3 gradient(const ScalarField3& s) {
  const auto ops = SpectralOps::for_grid(s.grid);
  return ops->inverse(ops->gradient(ops->forward(s.data)));
}

VectorField3 solenoidal_project(const VectorField3& v) {
  const auto ops = SpectralOps::for_grid(v.grid);
  auto spec = ops->forward(v);
  ops->project(spec);
  return ops->inverse(spec);
}

}  // namespace vld
