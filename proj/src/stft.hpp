// src/stft.hpp

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

#ifndef DIRSEP_STFT_HPP
#define DIRSEP_STFT_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "audio.hpp"

namespace dirsep {

enum class Window {
  kSqrtHann,  // sqrt-Hann analysis and synthesis (weighted overlap-add)
  kHann,      // Hann analysis, plain overlap-add synthesis
  kRect,      // rectangular analysis and synthesis
};

struct StftParams {
  int frame_size = 1024;
  int hop = 256;
  Window window = Window::kSqrtHann;
};

// Complex time-frequency grid of one channel. F = frame_size/2 + 1 rows,
// one column per frame. num_samples remembers the analyzed signal length
// so reconstruction can trim exactly; 0 means "not from stft", in which
// case istft returns the full overlap-add length.
struct ComplexGrid {
  Eigen::MatrixXcd values;  // F x T
  StftParams params;
  int sample_rate = 0;
  std::size_t num_samples = 0;

  int bins() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
};

// Normalized magnitude distribution: p >= 0 and sums to 1;
// scale * p recovers |grid| elementwise.
struct Spectrogram {
  Eigen::MatrixXd p;
  double scale = 0.0;
};

std::vector<double> analysis_window(Window w, int n);
std::vector<double> synthesis_window(Window w, int n);

// Frames a mono clip (zero-padding the final partial frame), applies the
// analysis window, and transforms each frame. Throws "signal too short"
// when the clip holds less than one frame.
ComplexGrid stft(const AudioClip& mono, const StftParams& params);

// Weighted overlap-add inverse with per-sample window-energy
// normalization. Throws when the window/hop pair leaves gaps in the
// interior coverage (non-COLA combination).
AudioClip istft(const ComplexGrid& grid);

Spectrogram normalize_magnitude(const ComplexGrid& grid);

}  // namespace dirsep

#endif  // DIRSEP_STFT_HPP
