// src/doa.hpp

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

#ifndef DIRSEP_DOA_HPP
#define DIRSEP_DOA_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stft.hpp"

namespace dirsep {

// Microphone positions in meters, one row per microphone, 2 or 3
// columns. The first microphone is the phase reference.
struct ArrayGeometry {
  Eigen::MatrixXd positions;
  double speed_of_sound = 340.29;  // m/s

  int mics() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
};

ArrayGeometry geometry_from_json(const std::string& json_text);
std::string geometry_to_json(const ArrayGeometry& geometry);

// Least-squares wave-vector solver: the pseudoinverse of the
// microphone-difference matrix is fixed by the geometry, so it is taken
// once here and each bin costs one small matrix-vector product.
struct DoaSolver {
  Eigen::MatrixXd diffs;  // (M-1) x dim, row i = x_{i+1} - x_0
  Eigen::MatrixXd pinv;   // dim x (M-1), pinv * diffs = I
};

// Throws "degenerate array geometry" when the difference matrix is
// rank deficient (e.g. collinear microphones in 2-D).
DoaSolver design_doa_solver(const ArrayGeometry& geometry);

// Wraps to (-pi, pi].
double wrap_phase(double x);

// Least-squares wave vector from one bin's STFT values across the
// array. Phase differences against the first microphone are wrapped to
// (-pi, pi) before solving. Returns nullopt when the reference value is
// zero (phase undefined, "unreliable bin").
std::optional<Eigen::VectorXd> estimate_doa(const DoaSolver& solver,
                                            std::span<const std::complex<double>> bin_values);

// Azimuth of k partitioned into D equal half-open arcs of [0, 2pi);
// k = 0 (including a 1-D or degenerate k) maps to bin 0.
int quantize_direction(const Eigen::VectorXd& k, int num_directions);

struct DirectionField {
  Eigen::MatrixXi d;  // F x T, direction bin per time-frequency cell
  int num_directions = 0;
};

// Per-bin DOA over a stack of per-channel grids (same shape, same
// parameters). Unreliable bins inherit the nearest-in-time reliable
// direction at the same frequency, falling back to bin 0.
DirectionField direction_field(const DoaSolver& solver, std::span<const ComplexGrid> channels,
                               int num_directions);

std::string direction_field_to_json(const DirectionField& field);
std::string direction_field_to_csv(const DirectionField& field);
DirectionField direction_field_from_json(const std::string& json_text);

}  // namespace dirsep

#endif  // DIRSEP_DOA_HPP
