// src/mixture.hpp

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

#ifndef DIRSEP_MIXTURE_HPP
#define DIRSEP_MIXTURE_HPP

#include <cstdint>
#include <vector>

#include "audio.hpp"
#include "doa.hpp"
#include "stft.hpp"

namespace dirsep {

// One synthesized test scene: S sources, S+1 microphone channels.
// Channel 0 carries every source undelayed; channel i delays source i
// by one sample and carries the rest undelayed. references holds each
// source as heard at channel 0 (after the joint gain).
struct MixtureScene {
  AudioClip mixture;                            // S+1 channels
  std::vector<std::vector<double>> references;  // per source, channel-0 image
  ArrayGeometry geometry;
  double gain = 1.0;  // joint peak normalization applied to all signals
};

// Microphone layout matching the delay construction: mic 0 at the
// origin, mic i on the unit circle at angle (i-1) * pi/2, radius
// delta = speed_of_sound / sample_rate (one sample of travel). Supports
// up to 4 sources in 2-D.
ArrayGeometry delay_scene_geometry(int num_sources, int sample_rate,
                                   double speed_of_sound = 340.29);

// Builds the scene from mono clips with a common sample rate. Clips are
// trimmed to the shortest, mixed per the delay construction, and jointly
// peak-normalized to 0.9 full scale (references get the same gain).
MixtureScene synthesize_mixture(const std::vector<AudioClip>& sources);

// Speech-like synthetic source: complex-Gaussian STFT noise shaped by a
// small bank of smooth spectral envelopes (the "speaker", from
// speaker_seed) gated by random segment activity (the "utterance", from
// utterance_seed), then inverted to a waveform peaking at 1.
std::vector<double> synthesize_speech_like(double seconds, int sample_rate,
                                           std::uint64_t speaker_seed,
                                           std::uint64_t utterance_seed,
                                           const StftParams& params = {});

// Near-separable synthetic source: a chord of bin-aligned sines inside
// one of `num_bands` disjoint frequency bands, slowly amplitude
// modulated. Sources built from different bands never share a bin.
std::vector<double> synthesize_band_chord(double seconds, int sample_rate, int band,
                                          int num_bands, std::uint64_t seed,
                                          const StftParams& params = {});

}  // namespace dirsep

#endif  // DIRSEP_MIXTURE_HPP
