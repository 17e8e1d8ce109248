// src/audio.hpp

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

#ifndef DIRSEP_AUDIO_HPP
#define DIRSEP_AUDIO_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace dirsep {

// Multichannel audio buffer. Samples are dimensionless amplitudes,
// nominally in [-1, 1]; all channels have equal length.
struct AudioClip {
  std::vector<std::vector<double>> samples;  // [channel][sample]
  int sample_rate = 0;                       // Hz

  int channels() const { return static_cast<int>(samples.size()); }
  std::size_t num_samples() const { return samples.empty() ? 0 : samples[0].size(); }
};

// Throws std::invalid_argument if channel lengths differ, the clip is
// empty, or the sample rate is not positive.
void validate(const AudioClip& clip);

AudioClip mono_channel(const AudioClip& clip, int channel);

// Shifts a mono channel right by `samples` (zero fill at the front,
// length preserved).
std::vector<double> delayed(const std::vector<double>& x, int samples);

enum class WavFormat { kPcm16, kFloat32 };

// RIFF/WAVE, PCM 16-bit or IEEE float 32-bit, any channel count.
// No resampling; sample rate is taken as stored.
AudioClip read_wav(const std::string& path);
void write_wav(const AudioClip& clip, const std::string& path,
               WavFormat format = WavFormat::kFloat32);

}  // namespace dirsep

#endif  // DIRSEP_AUDIO_HPP
