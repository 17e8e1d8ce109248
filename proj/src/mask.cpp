// src/mask.cpp

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

#include "mask.hpp"

#include <stdexcept>

namespace dirsep {

MaskMode parse_mask_mode(const std::string& name) {
  if (name == "conditioned") return MaskMode::kConditioned;
  if (name == "marginal") return MaskMode::kMarginal;
  throw std::invalid_argument("unknown mask mode: " + name);
}

std::string mask_mode_name(MaskMode mode) {
  return mode == MaskMode::kConditioned ? "conditioned" : "marginal";
}

SeparationMask ideal_binary_mask(const std::vector<ComplexGrid>& references) {
  if (references.empty()) throw std::invalid_argument("no reference grids");
  const int bins = static_cast<int>(references[0].values.rows());
  const int frames = static_cast<int>(references[0].values.cols());
  const int sources = static_cast<int>(references.size());
  for (const ComplexGrid& g : references) {
    if (g.values.rows() != bins || g.values.cols() != frames) {
      throw std::invalid_argument("reference grids differ in shape");
    }
  }
  SeparationMask mask;
  mask.weights.assign(sources, Eigen::MatrixXd::Zero(bins, frames));
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      int best = 0;
      double best_mag = std::abs(references[0].values(f, t));
      for (int s = 1; s < sources; ++s) {
        const double mag = std::abs(references[s].values(f, t));
        if (mag > best_mag) {
          best_mag = mag;
          best = s;
        }
      }
      mask.weights[best](f, t) = 1.0;
    }
  }
  return mask;
}

SeparationMask ideal_ratio_mask(const std::vector<ComplexGrid>& references) {
  if (references.empty()) throw std::invalid_argument("no reference grids");
  const int bins = static_cast<int>(references[0].values.rows());
  const int frames = static_cast<int>(references[0].values.cols());
  const int sources = static_cast<int>(references.size());
  for (const ComplexGrid& g : references) {
    if (g.values.rows() != bins || g.values.cols() != frames) {
      throw std::invalid_argument("reference grids differ in shape");
    }
  }
  SeparationMask mask;
  mask.weights.assign(sources, Eigen::MatrixXd(bins, frames));
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      double denom = 0.0;
      for (int s = 0; s < sources; ++s) denom += std::abs(references[s].values(f, t));
      for (int s = 0; s < sources; ++s) {
        mask.weights[s](f, t) =
            denom <= 0.0 ? 1.0 / sources : std::abs(references[s].values(f, t)) / denom;
      }
    }
  }
  return mask;
}

std::vector<std::vector<double>> apply_mask(const ComplexGrid& mixture,
                                            const SeparationMask& mask) {
  if (mask.sources() == 0) throw std::invalid_argument("empty mask");
  if (mask.bins() != mixture.values.rows() || mask.frames() != mixture.values.cols()) {
    throw std::invalid_argument("mask shape does not match mixture grid");
  }
  std::vector<std::vector<double>> out;
  out.reserve(mask.sources());
  for (int s = 0; s < mask.sources(); ++s) {
    ComplexGrid masked = mixture;
    masked.values = mixture.values.cwiseProduct(mask.weights[s].cast<std::complex<double>>());
    out.push_back(istft(masked).samples[0]);
  }
  return out;
}

}  // namespace dirsep
