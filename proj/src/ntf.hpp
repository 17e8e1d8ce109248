// src/ntf.hpp

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

#ifndef DIRSEP_NTF_HPP
#define DIRSEP_NTF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "doa.hpp"
#include "mask.hpp"
#include "nmf.hpp"

namespace dirsep {

// Directional NTF:
//   q(f,t,d,s,z) = dir(d,s) * dicts[s](f,z) * act[s](t,z)
// with dir summing to 1 over (d,s), dictionary columns over f, and each
// activation slice over (t,z).
struct DntfModel {
  Eigen::MatrixXd dir;                 // D x S, q(d,s)
  std::vector<Eigen::MatrixXd> dicts;  // per source, F x Z, q(f|z,s)
  std::vector<Eigen::MatrixXd> act;    // per source, T x Z, q(t,z|s)

  int sources() const { return static_cast<int>(dir.cols()); }
  int directions() const { return static_cast<int>(dir.rows()); }
  int bins() const { return dicts.empty() ? 0 : static_cast<int>(dicts[0].rows()); }
  int frames() const { return act.empty() ? 0 : static_cast<int>(act[0].rows()); }
  int atoms() const { return dicts.empty() ? 0 : static_cast<int>(dicts[0].cols()); }
};

DntfModel dntf_init(int bins, int frames, int atoms, int directions, int sources,
                    std::uint64_t seed);

Eigen::MatrixXd dntf_joint(const DntfModel& model, int source);  // q(f,t|s), F x T

// Model marginal at the observed direction of each cell:
// sum_s dir(field(f,t), s) * q(f,t|s).
Eigen::MatrixXd dntf_sparse_marginal(const DntfModel& model, const DirectionField& field);

// One multiplicative step against data confined to one direction per
// cell. Work is O(F T Z S) time and O(F T S) memory; the five-way
// tensor is never formed.
DntfModel dntf_sparse_update(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                             const DntfModel& model);

// KL divergence from the direction-confined data to the model. Equals
// the divergence between the corresponding dense tensors.
double dntf_sparse_kl(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                      const DntfModel& model);

// Dense counterpart over a full (f,t,d) tensor stored as a D x (F*T)
// matrix, cell (f,t) in column f + t*F. Used when every cell carries
// mass in several directions; costs O(F T D) extra memory.
Eigen::MatrixXd dntf_dense_marginal(const DntfModel& model);
DntfModel dntf_dense_update(const Eigen::MatrixXd& p_dense, const DntfModel& model);
double dntf_dense_kl(const Eigen::MatrixXd& p_dense, const DntfModel& model);

SeparationMask dntf_mask(const DntfModel& model, const DirectionField& field, MaskMode mode);

// Directional NMF baseline: q(f,t,d,s) = dir(d,s) * joint[s](f,t) with
// no atom structure, each joint slice summing to 1.
struct DnmfModel {
  Eigen::MatrixXd dir;                 // D x S
  std::vector<Eigen::MatrixXd> joint;  // per source, F x T, q(f,t|s)

  int sources() const { return static_cast<int>(dir.cols()); }
  int directions() const { return static_cast<int>(dir.rows()); }
  int bins() const { return joint.empty() ? 0 : static_cast<int>(joint[0].rows()); }
  int frames() const { return joint.empty() ? 0 : static_cast<int>(joint[0].cols()); }
};

DnmfModel dnmf_init(int bins, int frames, int directions, int sources, std::uint64_t seed);
Eigen::MatrixXd dnmf_sparse_marginal(const DnmfModel& model, const DirectionField& field);
DnmfModel dnmf_sparse_update(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                             const DnmfModel& model);
double dnmf_sparse_kl(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                      const DnmfModel& model);
SeparationMask dnmf_mask(const DnmfModel& model, const DirectionField& field, MaskMode mode);

// Circular statistics of one source's direction weights: azimuth of the
// resultant vector over arc centers and its length as concentration.
struct DirectionSummary {
  int source = 0;
  double azimuth = 0.0;        // [0, 2pi)
  double concentration = 0.0;  // resultant length in [0, 1]
  bool degenerate = false;     // no direction mass; azimuth is a placeholder
};

// One entry per source, sorted by azimuth.
std::vector<DirectionSummary> source_direction_summary(const Eigen::MatrixXd& dir);

}  // namespace dirsep

#endif  // DIRSEP_NTF_HPP
