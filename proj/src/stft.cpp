// src/stft.cpp

// Copyright 2026 dirsep authors
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

#include "stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace dirsep {

namespace {

constexpr double kPi = 3.14159265358979323846;

// FFTW plan creation is not thread safe; execution on private buffers is.
std::mutex g_fftw_mutex;

// One r2c/c2r plan pair with its own aligned buffers.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    real_ = fftw_alloc_real(n);
    cplx_ = fftw_alloc_complex(n / 2 + 1);
    if (!real_ || !cplx_) throw std::bad_alloc();
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("FFTW plan creation failed");
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    if (fwd_) fftw_destroy_plan(fwd_);
    if (inv_) fftw_destroy_plan(inv_);
    if (real_) fftw_free(real_);
    if (cplx_) fftw_free(cplx_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  double* real() { return real_; }
  fftw_complex* cplx() { return cplx_; }
  void forward() { fftw_execute(fwd_); }
  void inverse() { fftw_execute(inv_); }  // unnormalized; caller divides by n
  int size() const { return n_; }

 private:
  int n_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

void check_params(const StftParams& p) {
  if (p.frame_size < 2 || p.frame_size % 2 != 0)
    throw std::invalid_argument("frame_size must be even and >= 2");
  if (p.hop < 1) throw std::invalid_argument("hop must be >= 1");
}

}  // namespace

std::vector<double> analysis_window(Window w, int n) {
  std::vector<double> win(n);
  for (int i = 0; i < n; ++i) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);  // periodic form
    switch (w) {
      case Window::kSqrtHann: win[i] = std::sqrt(hann); break;
      case Window::kHann: win[i] = hann; break;
      case Window::kRect: win[i] = 1.0; break;
    }
  }
  return win;
}

std::vector<double> synthesis_window(Window w, int n) {
  switch (w) {
    case Window::kSqrtHann: return analysis_window(Window::kSqrtHann, n);
    case Window::kHann: return std::vector<double>(n, 1.0);  // plain OLA
    case Window::kRect: return std::vector<double>(n, 1.0);
  }
  return std::vector<double>(n, 1.0);
}

ComplexGrid stft(const AudioClip& mono, const StftParams& params) {
  validate(mono);
  check_params(params);
  if (mono.channels() != 1) throw std::invalid_argument("stft expects a mono clip");
  const std::vector<double>& x = mono.samples[0];
  int n = params.frame_size;
  if (x.size() < static_cast<std::size_t>(n)) throw std::invalid_argument("signal too short");

  std::size_t len = x.size();
  int num_frames =
      1 + static_cast<int>((len - static_cast<std::size_t>(n) + params.hop - 1) / params.hop);
  int bins = n / 2 + 1;
  std::vector<double> win = analysis_window(params.window, n);

  ComplexGrid grid;
  grid.params = params;
  grid.sample_rate = mono.sample_rate;
  grid.num_samples = len;
  grid.values.resize(bins, num_frames);

  FftPlan plan(n);
  for (int m = 0; m < num_frames; ++m) {
    std::size_t start = static_cast<std::size_t>(m) * params.hop;
    for (int i = 0; i < n; ++i) {
      std::size_t idx = start + i;
      plan.real()[i] = idx < len ? win[i] * x[idx] : 0.0;
    }
    plan.forward();
    for (int f = 0; f < bins; ++f)
      grid.values(f, m) = std::complex<double>(plan.cplx()[f][0], plan.cplx()[f][1]);
  }
  return grid;
}

AudioClip istft(const ComplexGrid& grid) {
  check_params(grid.params);
  int n = grid.params.frame_size;
  int hop = grid.params.hop;
  if (grid.bins() != n / 2 + 1)
    throw std::invalid_argument("grid bin count inconsistent with frame_size");
  int num_frames = grid.frames();
  if (num_frames < 1) throw std::invalid_argument("empty grid");

  std::vector<double> wa = analysis_window(grid.params.window, n);
  std::vector<double> ws = synthesis_window(grid.params.window, n);

  std::size_t full_len = static_cast<std::size_t>(num_frames - 1) * hop + n;
  std::vector<double> acc(full_len, 0.0);
  std::vector<double> den(full_len, 0.0);

  FftPlan plan(n);
  for (int m = 0; m < num_frames; ++m) {
    for (int f = 0; f < grid.bins(); ++f) {
      plan.cplx()[f][0] = grid.values(f, m).real();
      plan.cplx()[f][1] = grid.values(f, m).imag();
    }
    plan.inverse();
    std::size_t start = static_cast<std::size_t>(m) * hop;
    for (int i = 0; i < n; ++i) {
      acc[start + i] += ws[i] * plan.real()[i] / n;
      den[start + i] += wa[i] * ws[i];
    }
  }

  std::size_t target = grid.num_samples > 0 ? grid.num_samples : full_len;
  if (target > full_len) target = full_len;

  // Coverage check: interior samples (at least one full frame away from
  // either end) must be reachable through the window product, otherwise
  // the window/hop pair cannot reconstruct.
  double den_max = 0.0;
  for (double d : den) den_max = std::max(den_max, d);
  if (static_cast<std::size_t>(2 * n) < target) {
    for (std::size_t i = n; i + n < target; ++i)
      if (den[i] <= 1e-8 * den_max)
        throw std::invalid_argument("window/hop pair does not satisfy overlap-add coverage");
  }

  AudioClip out;
  out.sample_rate = grid.sample_rate > 0 ? grid.sample_rate : 1;
  out.samples.emplace_back(target, 0.0);
  double den_eps = 1e-12 * std::max(den_max, 1.0);
  for (std::size_t i = 0; i < target; ++i)
    out.samples[0][i] = den[i] > den_eps ? acc[i] / den[i] : 0.0;
  return out;
}

Spectrogram normalize_magnitude(const ComplexGrid& grid) {
  Eigen::MatrixXd mag = grid.values.cwiseAbs();
  double scale = mag.sum();
  if (scale <= 0.0) throw std::invalid_argument("empty spectrogram");
  Spectrogram s;
  s.p = mag / scale;
  s.scale = scale;
  return s;
}

}  // namespace dirsep
