// src/nmf.cpp

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

#include "nmf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rng.hpp"

namespace dirsep {

namespace {

void check_dims(int bins, int frames, int atoms) {
  if (bins <= 0 || frames <= 0 || atoms <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
}

// Normalizes each column to sum 1, keeping the previous column where the
// new mass is negligible so dead atoms stay valid distributions.
void normalize_columns(Eigen::MatrixXd& raw, const Eigen::MatrixXd& previous) {
  for (Eigen::Index z = 0; z < raw.cols(); ++z) {
    const double total = raw.col(z).sum();
    if (total < kDivEps) {
      raw.col(z) = previous.col(z);
    } else {
      raw.col(z) /= total;
    }
  }
}

void normalize_total(Eigen::MatrixXd& raw, const Eigen::MatrixXd& previous) {
  const double total = raw.sum();
  if (total < kDivEps) {
    raw = previous;
  } else {
    raw /= total;
  }
}

}  // namespace

NmfModel nmf_init(int bins, int frames, int atoms, std::uint64_t seed) {
  check_dims(bins, frames, atoms);
  RandomStream rng(seed);
  NmfModel model;
  model.dict.resize(bins, atoms);
  for (int z = 0; z < atoms; ++z) {
    for (int f = 0; f < bins; ++f) model.dict(f, z) = rng.uniform(0.1, 1.0);
    model.dict.col(z) /= model.dict.col(z).sum();
  }
  model.act.resize(frames, atoms);
  for (int z = 0; z < atoms; ++z) {
    for (int t = 0; t < frames; ++t) model.act(t, z) = rng.uniform(0.1, 1.0);
  }
  model.act /= model.act.sum();
  return model;
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("KL arguments differ in shape");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double pv = p(i, j);
      if (pv <= 0.0) continue;
      const double qv = q(i, j);
      if (qv <= 0.0) return std::numeric_limits<double>::infinity();
      total += pv * std::log(pv / qv);
    }
  }
  return total;
}

Eigen::MatrixXd nmf_marginal(const NmfModel& model) {
  return model.dict * model.act.transpose();
}

NmfModel nmf_update(const Eigen::MatrixXd& p_obs, const NmfModel& model) {
  if (p_obs.rows() != model.bins() || p_obs.cols() != model.frames()) {
    throw std::invalid_argument("data shape does not match model");
  }
  const Eigen::MatrixXd ratio =
      p_obs.cwiseQuotient(nmf_marginal(model).cwiseMax(kDivEps));
  NmfModel next;
  next.act = model.act.cwiseProduct(ratio.transpose() * model.dict);
  next.dict = model.dict.cwiseProduct(ratio * model.act);
  normalize_columns(next.dict, model.dict);
  normalize_total(next.act, model.act);
  return next;
}

Eigen::MatrixXd nmf_fit_dictionary(const Eigen::MatrixXd& p_train, int atoms, int iters,
                                   std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("iteration count must be positive");
  NmfModel model = nmf_init(static_cast<int>(p_train.rows()),
                            static_cast<int>(p_train.cols()), atoms, seed);
  for (int i = 0; i < iters; ++i) model = nmf_update(p_train, model);
  return model.dict;
}

SupervisedModel supervised_init(const std::vector<Eigen::MatrixXd>& dicts, int frames,
                                std::uint64_t seed) {
  if (dicts.empty()) throw std::invalid_argument("no dictionaries");
  const Eigen::Index bins = dicts[0].rows();
  for (const Eigen::MatrixXd& d : dicts) {
    if (d.rows() != bins || d.cols() <= 0) {
      throw std::invalid_argument("dictionaries differ in bin count");
    }
  }
  if (frames <= 0) throw std::invalid_argument("model dimensions must be positive");
  RandomStream rng(seed);
  SupervisedModel model;
  model.dicts = dicts;
  const int sources = static_cast<int>(dicts.size());
  model.act.resize(sources);
  for (int s = 0; s < sources; ++s) {
    Eigen::MatrixXd& a = model.act[s];
    a.resize(frames, dicts[s].cols());
    for (Eigen::Index z = 0; z < a.cols(); ++z) {
      for (int t = 0; t < frames; ++t) a(t, z) = rng.uniform(0.1, 1.0);
    }
    a /= a.sum();
  }
  model.weights = Eigen::VectorXd::Constant(sources, 1.0 / sources);
  return model;
}

std::vector<Eigen::MatrixXd> supervised_joint(const SupervisedModel& model) {
  std::vector<Eigen::MatrixXd> joint;
  joint.reserve(model.dicts.size());
  for (int s = 0; s < model.sources(); ++s) {
    joint.push_back(model.dicts[s] * model.act[s].transpose());
  }
  return joint;
}

Eigen::MatrixXd supervised_marginal(const SupervisedModel& model) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(model.bins(), model.frames());
  for (int s = 0; s < model.sources(); ++s) {
    q.noalias() += model.weights(s) * (model.dicts[s] * model.act[s].transpose());
  }
  return q;
}

SupervisedModel supervised_update(const Eigen::MatrixXd& p_obs, const SupervisedModel& model) {
  if (p_obs.rows() != model.bins() || p_obs.cols() != model.frames()) {
    throw std::invalid_argument("data shape does not match model");
  }
  const Eigen::MatrixXd ratio =
      p_obs.cwiseQuotient(supervised_marginal(model).cwiseMax(kDivEps));
  SupervisedModel next;
  next.dicts = model.dicts;
  next.act.resize(model.sources());
  next.weights.resize(model.sources());
  for (int s = 0; s < model.sources(); ++s) {
    Eigen::MatrixXd raw = model.act[s].cwiseProduct(ratio.transpose() * model.dicts[s]);
    raw *= model.weights(s);
    next.weights(s) = raw.sum();  // posterior source mass before renormalizing
    if (next.weights(s) < kDivEps) {
      next.act[s] = model.act[s];
    } else {
      next.act[s] = raw / next.weights(s);
    }
  }
  const double total = next.weights.sum();
  if (total < kDivEps) {
    next.weights = model.weights;
  } else {
    next.weights /= total;
  }
  return next;
}

SeparationMask supervised_mask(const SupervisedModel& model) {
  const std::vector<Eigen::MatrixXd> joint = supervised_joint(model);
  const int sources = model.sources();
  SeparationMask mask;
  mask.weights.assign(sources, Eigen::MatrixXd::Zero(model.bins(), model.frames()));
  for (int t = 0; t < model.frames(); ++t) {
    for (int f = 0; f < model.bins(); ++f) {
      double denom = 0.0;
      for (int s = 0; s < sources; ++s) denom += model.weights(s) * joint[s](f, t);
      for (int s = 0; s < sources; ++s) {
        mask.weights[s](f, t) = denom < kDivEps
                                    ? 1.0 / sources
                                    : model.weights(s) * joint[s](f, t) / denom;
      }
    }
  }
  return mask;
}

SupervisedFit supervised_nmf_fit(const Eigen::MatrixXd& p_mix,
                                 const std::vector<Eigen::MatrixXd>& dicts, int iters,
                                 std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("iteration count must be positive");
  SupervisedFit fit;
  fit.model = supervised_init(dicts, static_cast<int>(p_mix.cols()), seed);
  for (int i = 0; i < iters; ++i) fit.model = supervised_update(p_mix, fit.model);
  fit.mask = supervised_mask(fit.model);
  return fit;
}

}  // namespace dirsep
