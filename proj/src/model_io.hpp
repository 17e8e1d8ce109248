// src/model_io.hpp

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

#ifndef DIRSEP_MODEL_IO_HPP
#define DIRSEP_MODEL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bss_eval.hpp"
#include "mask.hpp"
#include "nmf.hpp"
#include "ntf.hpp"

namespace dirsep {

// Fit provenance recorded next to the factors so a run can be repeated.
struct FitInfo {
  std::uint64_t seed = 0;
  int iterations = 0;
  MaskMode mask_mode = MaskMode::kConditioned;
};

// Model JSON ("dirsep-model" format): dimensions, fit info, and factors
// as row-major nested arrays. Key order is alphabetical, so equal models
// serialize to identical bytes.
std::string dntf_model_to_json(const DntfModel& model, const FitInfo& info);
std::string dnmf_model_to_json(const DnmfModel& model, const FitInfo& info);
std::string supervised_model_to_json(const SupervisedModel& model, const FitInfo& info);

std::string bss_result_to_json(const BssEvalResult& result);

std::string direction_summary_to_json(const std::vector<DirectionSummary>& summary);

// Flat binary mask container: 8-byte magic "DIRSEPMK", little-endian
// u32 header length, JSON header {"dims":[S,F,T],"dtype":"float64",
// "order":"s-major, then f, t fastest"}, then the payload doubles.
std::vector<std::uint8_t> mask_to_blob(const SeparationMask& mask);
SeparationMask mask_from_blob(const std::vector<std::uint8_t>& blob);

void write_file(const std::string& path, const std::string& text);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::string read_file(const std::string& path);

}  // namespace dirsep

#endif  // DIRSEP_MODEL_IO_HPP
