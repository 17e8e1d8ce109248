// src/mixture.cpp

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

#include "mixture.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "rng.hpp"

namespace dirsep {

ArrayGeometry delay_scene_geometry(int num_sources, int sample_rate, double speed_of_sound) {
  if (num_sources < 1) throw std::invalid_argument("scene needs at least one source");
  if (num_sources > 4) {
    throw std::invalid_argument("delay scene construction supports at most 4 sources");
  }
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  const double delta = speed_of_sound / sample_rate;
  ArrayGeometry geometry;
  geometry.speed_of_sound = speed_of_sound;
  geometry.positions.setZero(num_sources + 1, 2);
  for (int i = 1; i <= num_sources; ++i) {
    const double angle = (i - 1) * M_PI / 2.0;
    geometry.positions(i, 0) = delta * std::cos(angle);
    geometry.positions(i, 1) = delta * std::sin(angle);
  }
  return geometry;
}

MixtureScene synthesize_mixture(const std::vector<AudioClip>& sources) {
  if (sources.size() < 2) throw std::invalid_argument("scene needs at least two sources");
  const int num_sources = static_cast<int>(sources.size());
  const int rate = sources[0].sample_rate;
  std::size_t length = sources[0].num_samples();
  for (const AudioClip& clip : sources) {
    validate(clip);
    if (clip.channels() != 1) throw std::invalid_argument("scene sources must be mono");
    if (clip.sample_rate != rate) throw std::invalid_argument("sample rates differ");
    length = std::min(length, clip.num_samples());
  }
  if (length == 0) throw std::invalid_argument("scene sources are empty");

  std::vector<std::vector<double>> refs(num_sources);
  for (int s = 0; s < num_sources; ++s) {
    refs[s].assign(sources[s].samples[0].begin(), sources[s].samples[0].begin() + length);
  }

  MixtureScene scene;
  scene.mixture.sample_rate = rate;
  scene.mixture.samples.assign(num_sources + 1, std::vector<double>(length, 0.0));
  for (int s = 0; s < num_sources; ++s) {
    const std::vector<double> shifted = delayed(refs[s], 1);
    for (int i = 0; i <= num_sources; ++i) {
      const std::vector<double>& contribution = (i == s + 1) ? shifted : refs[s];
      std::vector<double>& channel = scene.mixture.samples[i];
      for (std::size_t n = 0; n < length; ++n) channel[n] += contribution[n];
    }
  }

  double peak = 0.0;
  for (const std::vector<double>& channel : scene.mixture.samples) {
    for (double v : channel) peak = std::max(peak, std::abs(v));
  }
  scene.gain = peak > 0.0 ? 0.9 / peak : 1.0;
  for (std::vector<double>& channel : scene.mixture.samples) {
    for (double& v : channel) v *= scene.gain;
  }
  for (std::vector<double>& ref : refs) {
    for (double& v : ref) v *= scene.gain;
  }
  scene.references = std::move(refs);
  scene.geometry = delay_scene_geometry(num_sources, rate);
  return scene;
}

std::vector<double> synthesize_speech_like(double seconds, int sample_rate,
                                           std::uint64_t speaker_seed,
                                           std::uint64_t utterance_seed,
                                           const StftParams& params) {
  if (seconds <= 0.0 || sample_rate <= 0) {
    throw std::invalid_argument("invalid synthetic signal request");
  }
  const int num_samples = static_cast<int>(std::lround(seconds * sample_rate));
  if (num_samples < params.frame_size) {
    throw std::invalid_argument("synthetic signal shorter than one frame");
  }
  const int bins = params.frame_size / 2 + 1;
  const int frames =
      1 + static_cast<int>((num_samples - params.frame_size + params.hop - 1) / params.hop);

  // Speaker profile: a small bank of smooth spectral envelopes.
  constexpr int kPrototypes = 8;
  constexpr int kHarmonics = 10;
  RandomStream speaker(speaker_seed);
  // Per-speaker spectral tilt: two speakers then differ broadband, not
  // just in fine envelope structure, even when both are active.
  const double tilt = speaker.uniform(1.8, 3.2);
  std::vector<Eigen::VectorXd> envelopes(kPrototypes, Eigen::VectorXd(bins));
  for (int k = 0; k < kPrototypes; ++k) {
    Eigen::VectorXd coeffs(kHarmonics);
    for (int h = 0; h < kHarmonics; ++h) {
      coeffs(h) = speaker.gaussian() * 1.6 / std::sqrt(h + 1.0);
    }
    Eigen::VectorXd& env = envelopes[k];
    for (int f = 0; f < bins; ++f) {
      double log_env = -tilt * f / bins;
      for (int h = 0; h < kHarmonics; ++h) {
        log_env += coeffs(h) * std::cos(M_PI * (h + 1) * f / (bins - 1));
      }
      env(f) = std::exp(log_env);
    }
    env /= env.maxCoeff();
  }

  // Utterance: segments of one active prototype with short fades,
  // interleaved with silences.
  RandomStream utterance(utterance_seed);
  struct Segment {
    int start = 0, length = 0, proto = 0;
    double amp = 0.0;
    bool silent = false;
  };
  std::vector<Segment> segments;
  int t = 0;
  while (t < frames) {
    Segment seg;
    seg.start = t;
    seg.length = std::min(utterance.uniform_int(6, 24), frames - t);
    seg.silent = utterance.unit() < 0.35;
    seg.proto = utterance.uniform_int(0, kPrototypes - 1);
    seg.amp = utterance.uniform(0.5, 1.0);
    segments.push_back(seg);
    t += seg.length;
  }
  // Keep every utterance mostly voiced: if the random schedule came out
  // quieter than half the frames, wake leading silent segments.
  int active = 0;
  for (const Segment& seg : segments) {
    if (!seg.silent) active += seg.length;
  }
  const int min_active = std::max(1, frames / 2);
  for (Segment& seg : segments) {
    if (active >= min_active) break;
    if (seg.silent) {
      seg.silent = false;
      active += seg.length;
    }
  }
  std::vector<int> proto_of_frame(frames, -1);
  std::vector<double> amp_of_frame(frames, 0.0);
  for (const Segment& seg : segments) {
    if (seg.silent) continue;
    for (int i = 0; i < seg.length; ++i) {
      const double fade = (i == 0 || i == seg.length - 1) ? 0.5 : 1.0;
      proto_of_frame[seg.start + i] = seg.proto;
      amp_of_frame[seg.start + i] = seg.amp * fade;
    }
  }

  ComplexGrid grid;
  grid.params = params;
  grid.sample_rate = sample_rate;
  grid.num_samples = num_samples;
  grid.values.resize(bins, frames);
  for (int tt = 0; tt < frames; ++tt) {
    const double amp = amp_of_frame[tt];
    const Eigen::VectorXd* env = amp > 0.0 ? &envelopes[proto_of_frame[tt]] : nullptr;
    for (int f = 0; f < bins; ++f) {
      const double re = utterance.gaussian();
      const double im = utterance.gaussian();
      if (env == nullptr) {
        grid.values(f, tt) = 0.0;
        continue;
      }
      std::complex<double> v(re, im);
      if (f == 0 || f == bins - 1) v = std::complex<double>(re, 0.0);
      grid.values(f, tt) = amp * (*env)(f)*v * M_SQRT1_2;
    }
  }

  std::vector<double> signal = istft(grid).samples[0];
  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : signal) v /= peak;
  }
  return signal;
}

std::vector<double> synthesize_band_chord(double seconds, int sample_rate, int band,
                                          int num_bands, std::uint64_t seed,
                                          const StftParams& params) {
  if (seconds <= 0.0 || sample_rate <= 0) {
    throw std::invalid_argument("invalid synthetic signal request");
  }
  if (num_bands < 1 || band < 0 || band >= num_bands) {
    throw std::invalid_argument("band index out of range");
  }
  const int num_samples = static_cast<int>(std::lround(seconds * sample_rate));
  const int bins = params.frame_size / 2 + 1;
  constexpr int kMargin = 6;  // keep clear of DC and Nyquist
  constexpr int kGuard = 8;   // unused bins between adjacent bands
  const int usable = bins - 2 * kMargin - (num_bands - 1) * kGuard;
  const int band_width = usable / num_bands;
  if (band_width < 4) throw std::invalid_argument("too many bands for this frame size");
  const int start = kMargin + band * (band_width + kGuard);

  constexpr int kTones = 6;
  RandomStream rng(seed);
  std::vector<double> signal(num_samples, 0.0);
  for (int k = 0; k < kTones; ++k) {
    const int bin = start + 1 + k * (band_width - 2) / kTones;
    const double freq = static_cast<double>(bin) * sample_rate / params.frame_size;
    const double amp = rng.uniform(0.5, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    const double mod_rate = rng.uniform(0.3, 1.5);
    const double mod_phase = rng.uniform(0.0, 2.0 * M_PI);
    for (int n = 0; n < num_samples; ++n) {
      const double tsec = static_cast<double>(n) / sample_rate;
      const double mod = 0.55 + 0.45 * std::sin(2.0 * M_PI * mod_rate * tsec + mod_phase);
      signal[n] += amp * mod * std::sin(2.0 * M_PI * freq * tsec + phase);
    }
  }
  double peak = 0.0;
  for (double v : signal) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : signal) v /= peak;
  }
  return signal;
}

}  // namespace dirsep
