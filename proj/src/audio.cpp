// src/audio.cpp

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

#include "audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "errors.hpp"

namespace dirsep {

void validate(const AudioClip& clip) {
  if (clip.samples.empty()) throw std::invalid_argument("audio clip has no channels");
  if (clip.sample_rate <= 0) throw std::invalid_argument("audio clip sample rate must be positive");
  std::size_t len = clip.samples[0].size();
  for (const auto& ch : clip.samples)
    if (ch.size() != len) throw std::invalid_argument("audio channels have unequal lengths");
}

AudioClip mono_channel(const AudioClip& clip, int channel) {
  if (channel < 0 || channel >= clip.channels())
    throw std::invalid_argument("channel index out of range");
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.push_back(clip.samples[channel]);
  return out;
}

std::vector<double> delayed(const std::vector<double>& x, int samples) {
  if (samples < 0) throw std::invalid_argument("delay must be nonnegative");
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = static_cast<std::size_t>(samples); n < x.size(); ++n)
    y[n] = x[n - samples];
  return y;
}

namespace {

// Little-endian readers; WAV is little-endian and so are all targets
// this project builds on.
uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void append_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}
void append_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xfffe;

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  uint16_t format_code = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  uint32_t data_size = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = p + pos;
    uint32_t chunk_size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (body + chunk_size > size) chunk_size = static_cast<uint32_t>(size - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && chunk_size >= 16) {
      format_code = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      sample_rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format_code == kFormatExtensible && chunk_size >= 40) {
        // First two bytes of the SubFormat GUID carry the real code.
        format_code = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !data) throw FormatError("WAV file missing fmt or data chunk: " + path);
  if (channels == 0 || sample_rate == 0)
    throw FormatError("WAV file has invalid format fields: " + path);

  bool pcm16 = format_code == kFormatPcm && bits == 16;
  bool float32 = format_code == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw FormatError("unsupported WAV encoding (want 16-bit PCM or 32-bit float): " + path);

  uint32_t bytes_per_sample = bits / 8;
  uint32_t frame_bytes = bytes_per_sample * channels;
  std::size_t frames = data_size / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.samples.assign(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    const unsigned char* frame = data + n * frame_bytes;
    for (uint16_t c = 0; c < channels; ++c) {
      const unsigned char* s = frame + c * bytes_per_sample;
      if (pcm16) {
        int16_t v = static_cast<int16_t>(read_u16(s));
        clip.samples[c][n] = static_cast<double>(v) / 32767.0;
      } else {
        float v;
        std::memcpy(&v, s, 4);
        clip.samples[c][n] = static_cast<double>(v);
      }
    }
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::string& path, WavFormat format) {
  validate(clip);
  uint16_t channels = static_cast<uint16_t>(clip.channels());
  uint32_t frames = static_cast<uint32_t>(clip.num_samples());
  bool pcm = format == WavFormat::kPcm16;
  uint16_t bits = pcm ? 16 : 32;
  uint16_t block_align = static_cast<uint16_t>(channels * bits / 8);
  uint32_t data_size = frames * block_align;

  std::string out;
  out.reserve(data_size + 64);
  out += "RIFF";
  uint32_t fact_size = pcm ? 0 : 12;  // non-PCM files carry a fact chunk
  append_u32(out, 4 + 24 + fact_size + 8 + data_size);
  out += "WAVE";
  out += "fmt ";
  append_u32(out, 16);
  append_u16(out, pcm ? kFormatPcm : kFormatFloat);
  append_u16(out, channels);
  append_u32(out, static_cast<uint32_t>(clip.sample_rate));
  append_u32(out, static_cast<uint32_t>(clip.sample_rate) * block_align);
  append_u16(out, block_align);
  append_u16(out, bits);
  if (!pcm) {
    out += "fact";
    append_u32(out, 4);
    append_u32(out, frames);
  }
  out += "data";
  append_u32(out, data_size);

  for (uint32_t n = 0; n < frames; ++n) {
    for (uint16_t c = 0; c < channels; ++c) {
      double x = clip.samples[c][n];
      if (pcm) {
        double clamped = std::clamp(x, -1.0, 1.0);
        int16_t v = static_cast<int16_t>(std::lrint(clamped * 32767.0));
        append_u16(out, static_cast<uint16_t>(v));
      } else {
        float v = static_cast<float>(x);
        uint32_t raw;
        std::memcpy(&raw, &v, 4);
        append_u32(out, raw);
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open file for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed to write WAV file: " + path);
}

}  // namespace dirsep
