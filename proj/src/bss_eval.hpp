// src/bss_eval.hpp

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

#ifndef DIRSEP_BSS_EVAL_HPP
#define DIRSEP_BSS_EVAL_HPP

#include <vector>

namespace dirsep {

// Ratios are reported in dB clamped to +/-kDbCap; a zero-energy target
// gives -kDbCap, a vanishing error term +kDbCap.
constexpr double kDbCap = 300.0;

struct BssScores {
  double sdr = 0.0;
  double sir = 0.0;
  double sar = 0.0;
};

// Energy-ratio criteria for one estimate against reference `target`,
// allowing a causal filter of `filter_length` taps on every reference.
// The estimate is decomposed into the projection onto the target's
// delayed copies, the extra reach of all references' delayed copies,
// and the remainder.
BssScores bss_eval_single(const std::vector<std::vector<double>>& references, int target,
                          const std::vector<double>& estimate, int filter_length);

struct BssEvalResult {
  // Indexed by reference; entry j scores the estimate assigned to
  // reference j under the best permutation.
  std::vector<BssScores> per_source;
  std::vector<int> assignment;  // assignment[j] = index of that estimate
  int filter_length = 0;
};

// Scores every estimate against every reference and keeps the
// permutation with the highest mean SIR (first in lexicographic order
// on ties).
BssEvalResult bss_eval(const std::vector<std::vector<double>>& references,
                       const std::vector<std::vector<double>>& estimates, int filter_length);

}  // namespace dirsep

#endif  // DIRSEP_BSS_EVAL_HPP
