// src/nmf.hpp

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

#ifndef DIRSEP_NMF_HPP
#define DIRSEP_NMF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mask.hpp"

namespace dirsep {

// Floor applied to every denominator before division so updates stay
// total on data with zero-mass cells.
constexpr double kDivEps = 1e-12;

// Probabilistic NMF model: p(f,t) ~ sum_z dict(f,z) * act(t,z), with
// dict columns normalized over f and act summing to 1 overall.
struct NmfModel {
  Eigen::MatrixXd dict;  // F x Z, q(f|z)
  Eigen::MatrixXd act;   // T x Z, q(t,z)

  int bins() const { return static_cast<int>(dict.rows()); }
  int frames() const { return static_cast<int>(act.rows()); }
  int atoms() const { return static_cast<int>(dict.cols()); }
};

// Strictly positive random start, deterministic per seed. Entries are
// drawn uniform(0.1, 1) before normalization to avoid stalled cells.
NmfModel nmf_init(int bins, int frames, int atoms, std::uint64_t seed);

// sum p log(p/q) with the 0 log 0 = 0 convention; +infinity when q
// vanishes where p does not.
double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

Eigen::MatrixXd nmf_marginal(const NmfModel& model);  // q(f,t) = dict * act^T

// One multiplicative minorization step. Never materializes an F x T x Z
// array; uses two matrix products plus elementwise work.
NmfModel nmf_update(const Eigen::MatrixXd& p_obs, const NmfModel& model);

// Runs `iters` updates on training data and keeps only the dictionary.
Eigen::MatrixXd nmf_fit_dictionary(const Eigen::MatrixXd& p_train, int atoms, int iters,
                                   std::uint64_t seed);

// Mixture model with per-source dictionaries held fixed:
// p(f,t) ~ sum_s weights(s) sum_z dicts[s](f,z) act[s](t,z).
struct SupervisedModel {
  std::vector<Eigen::MatrixXd> dicts;  // per source, F x Z_s (fixed)
  std::vector<Eigen::MatrixXd> act;    // per source, T x Z_s, q(t,z|s)
  Eigen::VectorXd weights;             // q(s)

  int sources() const { return static_cast<int>(dicts.size()); }
  int bins() const { return dicts.empty() ? 0 : static_cast<int>(dicts[0].rows()); }
  int frames() const { return act.empty() ? 0 : static_cast<int>(act[0].rows()); }
};

SupervisedModel supervised_init(const std::vector<Eigen::MatrixXd>& dicts, int frames,
                                std::uint64_t seed);

// Per-source marginals q(f,t|s) = dicts[s] * act[s]^T.
std::vector<Eigen::MatrixXd> supervised_joint(const SupervisedModel& model);

Eigen::MatrixXd supervised_marginal(const SupervisedModel& model);

// One multiplicative step updating activations and source weights only.
SupervisedModel supervised_update(const Eigen::MatrixXd& p_obs, const SupervisedModel& model);

SeparationMask supervised_mask(const SupervisedModel& model);

struct SupervisedFit {
  SupervisedModel model;
  SeparationMask mask;
};

SupervisedFit supervised_nmf_fit(const Eigen::MatrixXd& p_mix,
                                 const std::vector<Eigen::MatrixXd>& dicts, int iters,
                                 std::uint64_t seed);

}  // namespace dirsep

#endif  // DIRSEP_NMF_HPP
