// src/mask.hpp

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

#ifndef DIRSEP_MASK_HPP
#define DIRSEP_MASK_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stft.hpp"

namespace dirsep {

// Per-source soft weights over time-frequency bins. Weights at each
// (f,t) are nonnegative and sum to 1 across sources.
struct SeparationMask {
  std::vector<Eigen::MatrixXd> weights;  // per source, F x T

  int sources() const { return static_cast<int>(weights.size()); }
  int bins() const { return weights.empty() ? 0 : static_cast<int>(weights[0].rows()); }
  int frames() const { return weights.empty() ? 0 : static_cast<int>(weights[0].cols()); }
};

enum class MaskMode {
  kConditioned,  // weight direction evidence per bin
  kMarginal,     // direction marginalized out
};

MaskMode parse_mask_mode(const std::string& name);
std::string mask_mode_name(MaskMode mode);

// Oracle mask: assigns each bin entirely to the source with the largest
// reference magnitude there (lowest index on ties).
SeparationMask ideal_binary_mask(const std::vector<ComplexGrid>& references);

// Oracle mask: magnitude share |G_s| / sum_s' |G_s'| per bin; all-zero
// bins get uniform 1/S.
SeparationMask ideal_ratio_mask(const std::vector<ComplexGrid>& references);

// Scales the mixture coefficients by each source's weights and inverts.
// Output signals have the mixture's length.
std::vector<std::vector<double>> apply_mask(const ComplexGrid& mixture,
                                            const SeparationMask& mask);

}  // namespace dirsep

#endif  // DIRSEP_MASK_HPP
