// src/doa.cpp

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

#include "doa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "parallel.hpp"

namespace dirsep {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

ArrayGeometry geometry_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (!j.contains("positions") || !j["positions"].is_array() || j["positions"].empty())
    throw std::invalid_argument("geometry JSON needs a non-empty positions array");
  const auto& rows = j["positions"];
  std::size_t dim = rows[0].size();
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("geometry positions must be 2-D or 3-D");
  ArrayGeometry g;
  g.positions.resize(static_cast<int>(rows.size()), static_cast<int>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim)
      throw std::invalid_argument("geometry positions have mixed dimensions");
    for (std::size_t c = 0; c < dim; ++c)
      g.positions(static_cast<int>(i), static_cast<int>(c)) = rows[i][c].get<double>();
  }
  if (j.contains("speed_of_sound")) g.speed_of_sound = j["speed_of_sound"].get<double>();
  if (g.speed_of_sound <= 0.0) throw std::invalid_argument("speed_of_sound must be positive");
  return g;
}

std::string geometry_to_json(const ArrayGeometry& geometry) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < geometry.mics(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < geometry.dim(); ++c) row.push_back(geometry.positions(i, c));
    rows.push_back(row);
  }
  nlohmann::json j;
  j["positions"] = rows;
  j["speed_of_sound"] = geometry.speed_of_sound;
  return j.dump();
}

DoaSolver design_doa_solver(const ArrayGeometry& geometry) {
  int m = geometry.mics();
  int dim = geometry.dim();
  if (dim != 2 && dim != 3) throw std::invalid_argument("geometry must be 2-D or 3-D");
  if (m < dim + 1) throw std::invalid_argument("degenerate array geometry: need at least dim+1 microphones");

  DoaSolver solver;
  solver.diffs.resize(m - 1, dim);
  for (int i = 1; i < m; ++i)
    solver.diffs.row(i - 1) = geometry.positions.row(i) - geometry.positions.row(0);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(solver.diffs,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-9 * sv(0) || sv(0) == 0.0)
    throw std::invalid_argument("degenerate array geometry");

  Eigen::VectorXd inv_sv = sv.cwiseInverse();
  solver.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return solver;
}

double wrap_phase(double x) {
  double w = std::remainder(x, kTwoPi);  // [-pi, pi]
  if (w <= -kPi) w += kTwoPi;
  return w;
}

std::optional<Eigen::VectorXd> estimate_doa(const DoaSolver& solver,
                                            std::span<const std::complex<double>> bin_values) {
  int m = static_cast<int>(solver.diffs.rows()) + 1;
  if (static_cast<int>(bin_values.size()) != m)
    throw std::invalid_argument("bin value count does not match microphone count");
  if (std::abs(bin_values[0]) == 0.0) return std::nullopt;
  double ref_phase = std::arg(bin_values[0]);
  Eigen::VectorXd delta(m - 1);
  for (int i = 1; i < m; ++i)
    delta(i - 1) = wrap_phase(std::arg(bin_values[i]) - ref_phase);
  return solver.pinv * delta;
}

int quantize_direction(const Eigen::VectorXd& k, int num_directions) {
  if (num_directions < 1) throw std::invalid_argument("direction bin count must be >= 1");
  if (k.size() < 2) return 0;
  double kx = k(0), ky = k(1);
  if (kx == 0.0 && ky == 0.0) return 0;
  double az = std::atan2(ky, kx);
  if (az < 0.0) az += kTwoPi;
  if (az >= kTwoPi) az = 0.0;
  int idx = static_cast<int>(std::floor(az * num_directions / kTwoPi));
  if (idx < 0) idx = 0;
  if (idx >= num_directions) idx = num_directions - 1;
  return idx;
}

DirectionField direction_field(const DoaSolver& solver, std::span<const ComplexGrid> channels,
                               int num_directions) {
  if (channels.empty()) throw std::invalid_argument("no channels given");
  int m = static_cast<int>(solver.diffs.rows()) + 1;
  if (static_cast<int>(channels.size()) != m)
    throw std::invalid_argument("channel count does not match microphone count");
  int bins = channels[0].bins();
  int frames = channels[0].frames();
  for (const ComplexGrid& g : channels)
    if (g.bins() != bins || g.frames() != frames)
      throw std::invalid_argument("channel grids have mismatched shapes");
  if (num_directions < 1) throw std::invalid_argument("direction bin count must be >= 1");

  DirectionField field;
  field.num_directions = num_directions;
  field.d.setZero(bins, frames);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reliable(bins, frames);

  parallel_for(0, bins, [&](int f) {
    std::vector<std::complex<double>> y(m);
    for (int t = 0; t < frames; ++t) {
      for (int i = 0; i < m; ++i) y[i] = channels[i].values(f, t);
      auto k = estimate_doa(solver, y);
      if (k.has_value()) {
        field.d(f, t) = quantize_direction(*k, num_directions);
        reliable(f, t) = true;
      } else {
        reliable(f, t) = false;
      }
    }
  });

  // Unreliable bins (zero reference magnitude) take the nearest reliable
  // direction in time at the same frequency; rows without any reliable
  // bin stay at 0.
  parallel_for(0, bins, [&](int f) {
    std::vector<int> fill(frames, 0);
    std::vector<int> dist(frames, frames + 1);
    int last = -1;
    for (int t = 0; t < frames; ++t) {
      if (reliable(f, t)) last = t;
      if (last >= 0) {
        fill[t] = field.d(f, last);
        dist[t] = t - last;
      }
    }
    last = -1;
    for (int t = frames - 1; t >= 0; --t) {
      if (reliable(f, t)) last = t;
      if (last >= 0 && last - t < dist[t]) {
        fill[t] = field.d(f, last);
        dist[t] = last - t;
      }
    }
    for (int t = 0; t < frames; ++t)
      if (!reliable(f, t)) field.d(f, t) = fill[t];
  });

  return field;
}

std::string direction_field_to_json(const DirectionField& field) {
  nlohmann::json j;
  j["bins"] = field.d.rows();
  j["frames"] = field.d.cols();
  j["num_directions"] = field.num_directions;
  nlohmann::json rows = nlohmann::json::array();
  for (int f = 0; f < field.d.rows(); ++f) {
    nlohmann::json row = nlohmann::json::array();
    for (int t = 0; t < field.d.cols(); ++t) row.push_back(field.d(f, t));
    rows.push_back(std::move(row));
  }
  j["d"] = std::move(rows);
  return j.dump();
}

std::string direction_field_to_csv(const DirectionField& field) {
  std::ostringstream out;
  for (int f = 0; f < field.d.rows(); ++f) {
    for (int t = 0; t < field.d.cols(); ++t) {
      if (t) out << ',';
      out << field.d(f, t);
    }
    out << '\n';
  }
  return out.str();
}

DirectionField direction_field_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DirectionField field;
  field.num_directions = j.at("num_directions").get<int>();
  int bins = j.at("bins").get<int>();
  int frames = j.at("frames").get<int>();
  const auto& rows = j.at("d");
  if (static_cast<int>(rows.size()) != bins)
    throw std::invalid_argument("direction field JSON row count mismatch");
  field.d.resize(bins, frames);
  for (int f = 0; f < bins; ++f) {
    if (static_cast<int>(rows[f].size()) != frames)
      throw std::invalid_argument("direction field JSON column count mismatch");
    for (int t = 0; t < frames; ++t) {
      int v = rows[f][t].get<int>();
      if (v < 0 || v >= field.num_directions)
        throw std::invalid_argument("direction index out of range in JSON");
      field.d(f, t) = v;
    }
  }
  return field;
}

}  // namespace dirsep
