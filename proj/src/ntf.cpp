// src/ntf.cpp

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

#include "ntf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"
#include "rng.hpp"

namespace dirsep {

namespace {

void check_field(const DirectionField& field, int bins, int frames, int directions) {
  if (field.d.rows() != bins || field.d.cols() != frames) {
    throw std::invalid_argument("direction field shape does not match data");
  }
  if (field.num_directions != directions) {
    throw std::invalid_argument("direction field bin count does not match model");
  }
  if (field.d.minCoeff() < 0 || field.d.maxCoeff() >= directions) {
    throw std::invalid_argument("direction field entry out of range");
  }
}

void normalize_dict_columns(Eigen::MatrixXd& raw, const Eigen::MatrixXd& previous) {
  for (Eigen::Index z = 0; z < raw.cols(); ++z) {
    const double total = raw.col(z).sum();
    if (total < kDivEps) {
      raw.col(z) = previous.col(z);
    } else {
      raw.col(z) /= total;
    }
  }
}

void normalize_slice(Eigen::MatrixXd& raw, const Eigen::MatrixXd& previous) {
  const double total = raw.sum();
  if (total < kDivEps) {
    raw = previous;
  } else {
    raw /= total;
  }
}

void normalize_dir(Eigen::MatrixXd& raw, const Eigen::MatrixXd& previous) {
  // Column-wise accumulation keeps the total, and so the whole update,
  // exactly invariant under relabeling a pair of sources.
  double total = 0.0;
  for (Eigen::Index s = 0; s < raw.cols(); ++s) total += raw.col(s).sum();
  if (total < kDivEps) {
    raw = previous;
  } else {
    raw /= total;
  }
}

// Weighted ratio for one source under the sparse observation:
// w(f,t) = ratio(f,t) * dir(field(f,t), s).
Eigen::MatrixXd gather_direction_weight(const Eigen::MatrixXd& ratio,
                                        const DirectionField& field,
                                        const Eigen::MatrixXd& dir, int source) {
  Eigen::MatrixXd w(ratio.rows(), ratio.cols());
  for (Eigen::Index t = 0; t < ratio.cols(); ++t) {
    for (Eigen::Index f = 0; f < ratio.rows(); ++f) {
      w(f, t) = ratio(f, t) * dir(field.d(f, t), source);
    }
  }
  return w;
}

SeparationMask mask_from_slices(const std::vector<Eigen::MatrixXd>& weighted) {
  const int sources = static_cast<int>(weighted.size());
  const Eigen::Index bins = weighted[0].rows();
  const Eigen::Index frames = weighted[0].cols();
  SeparationMask mask;
  mask.weights.assign(sources, Eigen::MatrixXd(bins, frames));
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index f = 0; f < bins; ++f) {
      double denom = 0.0;
      for (int s = 0; s < sources; ++s) denom += weighted[s](f, t);
      for (int s = 0; s < sources; ++s) {
        mask.weights[s](f, t) =
            denom < kDivEps ? 1.0 / sources : weighted[s](f, t) / denom;
      }
    }
  }
  return mask;
}

}  // namespace

DntfModel dntf_init(int bins, int frames, int atoms, int directions, int sources,
                    std::uint64_t seed) {
  if (bins <= 0 || frames <= 0 || atoms <= 0 || directions <= 0 || sources <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  RandomStream rng(seed);
  DntfModel model;
  model.dir.resize(directions, sources);
  for (int s = 0; s < sources; ++s) {
    for (int d = 0; d < directions; ++d) model.dir(d, s) = rng.uniform(0.1, 1.0);
  }
  model.dir /= model.dir.sum();
  model.dicts.resize(sources);
  model.act.resize(sources);
  for (int s = 0; s < sources; ++s) {
    Eigen::MatrixXd& dict = model.dicts[s];
    dict.resize(bins, atoms);
    for (int z = 0; z < atoms; ++z) {
      for (int f = 0; f < bins; ++f) dict(f, z) = rng.uniform(0.1, 1.0);
      dict.col(z) /= dict.col(z).sum();
    }
    Eigen::MatrixXd& act = model.act[s];
    act.resize(frames, atoms);
    for (int z = 0; z < atoms; ++z) {
      for (int t = 0; t < frames; ++t) act(t, z) = rng.uniform(0.1, 1.0);
    }
    act /= act.sum();
  }
  return model;
}

Eigen::MatrixXd dntf_joint(const DntfModel& model, int source) {
  return model.dicts[source] * model.act[source].transpose();
}

Eigen::MatrixXd dntf_sparse_marginal(const DntfModel& model, const DirectionField& field) {
  check_field(field, model.bins(), model.frames(), model.directions());
  Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(model.bins(), model.frames());
  for (int s = 0; s < model.sources(); ++s) {
    const Eigen::MatrixXd joint = dntf_joint(model, s);
    for (Eigen::Index t = 0; t < q0.cols(); ++t) {
      for (Eigen::Index f = 0; f < q0.rows(); ++f) {
        q0(f, t) += model.dir(field.d(f, t), s) * joint(f, t);
      }
    }
  }
  return q0;
}

DntfModel dntf_sparse_update(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                             const DntfModel& model) {
  if (p_obs.rows() != model.bins() || p_obs.cols() != model.frames()) {
    throw std::invalid_argument("data shape does not match model");
  }
  check_field(field, model.bins(), model.frames(), model.directions());
  const int sources = model.sources();

  std::vector<Eigen::MatrixXd> joint(sources);
  for (int s = 0; s < sources; ++s) joint[s] = dntf_joint(model, s);

  Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(model.bins(), model.frames());
  for (int s = 0; s < sources; ++s) {
    for (Eigen::Index t = 0; t < q0.cols(); ++t) {
      for (Eigen::Index f = 0; f < q0.rows(); ++f) {
        q0(f, t) += model.dir(field.d(f, t), s) * joint[s](f, t);
      }
    }
  }
  const Eigen::MatrixXd ratio = p_obs.cwiseQuotient(q0.cwiseMax(kDivEps));

  DntfModel next;
  next.dir.setZero(model.directions(), sources);
  next.dicts.resize(sources);
  next.act.resize(sources);
  parallel_for(0, sources, [&](int s) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.directions());
    for (Eigen::Index t = 0; t < ratio.cols(); ++t) {
      for (Eigen::Index f = 0; f < ratio.rows(); ++f) {
        acc(field.d(f, t)) += ratio(f, t) * joint[s](f, t);
      }
    }
    next.dir.col(s) = model.dir.col(s).cwiseProduct(acc);
    const Eigen::MatrixXd w = gather_direction_weight(ratio, field, model.dir, s);
    next.dicts[s] = model.dicts[s].cwiseProduct(w * model.act[s]);
    next.act[s] = model.act[s].cwiseProduct(w.transpose() * model.dicts[s]);
    normalize_dict_columns(next.dicts[s], model.dicts[s]);
    normalize_slice(next.act[s], model.act[s]);
  });
  normalize_dir(next.dir, model.dir);
  return next;
}

double dntf_sparse_kl(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                      const DntfModel& model) {
  return kl_divergence(p_obs, dntf_sparse_marginal(model, field));
}

Eigen::MatrixXd dntf_dense_marginal(const DntfModel& model) {
  const int cells = model.bins() * model.frames();
  Eigen::MatrixXd jmat(model.sources(), cells);
  for (int s = 0; s < model.sources(); ++s) {
    const Eigen::MatrixXd joint = dntf_joint(model, s);
    jmat.row(s) = Eigen::Map<const Eigen::VectorXd>(joint.data(), cells).transpose();
  }
  return model.dir * jmat;
}

DntfModel dntf_dense_update(const Eigen::MatrixXd& p_dense, const DntfModel& model) {
  const int cells = model.bins() * model.frames();
  if (p_dense.rows() != model.directions() || p_dense.cols() != cells) {
    throw std::invalid_argument("data shape does not match model");
  }
  const int sources = model.sources();

  Eigen::MatrixXd jmat(sources, cells);
  for (int s = 0; s < sources; ++s) {
    const Eigen::MatrixXd joint = dntf_joint(model, s);
    jmat.row(s) = Eigen::Map<const Eigen::VectorXd>(joint.data(), cells).transpose();
  }
  const Eigen::MatrixXd ratio =
      p_dense.cwiseQuotient((model.dir * jmat).cwiseMax(kDivEps));

  DntfModel next;
  next.dir = model.dir.cwiseProduct(ratio * jmat.transpose());
  const Eigen::MatrixXd gmat = model.dir.transpose() * ratio;  // S x cells
  next.dicts.resize(sources);
  next.act.resize(sources);
  for (int s = 0; s < sources; ++s) {
    Eigen::MatrixXd gs(model.bins(), model.frames());
    for (int t = 0; t < model.frames(); ++t) {
      for (int f = 0; f < model.bins(); ++f) gs(f, t) = gmat(s, f + t * model.bins());
    }
    next.dicts[s] = model.dicts[s].cwiseProduct(gs * model.act[s]);
    next.act[s] = model.act[s].cwiseProduct(gs.transpose() * model.dicts[s]);
    normalize_dict_columns(next.dicts[s], model.dicts[s]);
    normalize_slice(next.act[s], model.act[s]);
  }
  normalize_dir(next.dir, model.dir);
  return next;
}

double dntf_dense_kl(const Eigen::MatrixXd& p_dense, const DntfModel& model) {
  return kl_divergence(p_dense, dntf_dense_marginal(model));
}

SeparationMask dntf_mask(const DntfModel& model, const DirectionField& field, MaskMode mode) {
  check_field(field, model.bins(), model.frames(), model.directions());
  std::vector<Eigen::MatrixXd> weighted(model.sources());
  for (int s = 0; s < model.sources(); ++s) {
    const Eigen::MatrixXd joint = dntf_joint(model, s);
    if (mode == MaskMode::kMarginal) {
      weighted[s] = model.dir.col(s).sum() * joint;
    } else {
      weighted[s].resize(joint.rows(), joint.cols());
      for (Eigen::Index t = 0; t < joint.cols(); ++t) {
        for (Eigen::Index f = 0; f < joint.rows(); ++f) {
          weighted[s](f, t) = model.dir(field.d(f, t), s) * joint(f, t);
        }
      }
    }
  }
  return mask_from_slices(weighted);
}

DnmfModel dnmf_init(int bins, int frames, int directions, int sources, std::uint64_t seed) {
  if (bins <= 0 || frames <= 0 || directions <= 0 || sources <= 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  RandomStream rng(seed);
  DnmfModel model;
  model.dir.resize(directions, sources);
  for (int s = 0; s < sources; ++s) {
    for (int d = 0; d < directions; ++d) model.dir(d, s) = rng.uniform(0.1, 1.0);
  }
  model.dir /= model.dir.sum();
  model.joint.resize(sources);
  for (int s = 0; s < sources; ++s) {
    Eigen::MatrixXd& j = model.joint[s];
    j.resize(bins, frames);
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < bins; ++f) j(f, t) = rng.uniform(0.1, 1.0);
    }
    j /= j.sum();
  }
  return model;
}

Eigen::MatrixXd dnmf_sparse_marginal(const DnmfModel& model, const DirectionField& field) {
  check_field(field, model.bins(), model.frames(), model.directions());
  Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(model.bins(), model.frames());
  for (int s = 0; s < model.sources(); ++s) {
    for (Eigen::Index t = 0; t < q0.cols(); ++t) {
      for (Eigen::Index f = 0; f < q0.rows(); ++f) {
        q0(f, t) += model.dir(field.d(f, t), s) * model.joint[s](f, t);
      }
    }
  }
  return q0;
}

DnmfModel dnmf_sparse_update(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                             const DnmfModel& model) {
  if (p_obs.rows() != model.bins() || p_obs.cols() != model.frames()) {
    throw std::invalid_argument("data shape does not match model");
  }
  const Eigen::MatrixXd ratio =
      p_obs.cwiseQuotient(dnmf_sparse_marginal(model, field).cwiseMax(kDivEps));
  DnmfModel next;
  next.dir.setZero(model.directions(), model.sources());
  next.joint.resize(model.sources());
  for (int s = 0; s < model.sources(); ++s) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.directions());
    for (Eigen::Index t = 0; t < ratio.cols(); ++t) {
      for (Eigen::Index f = 0; f < ratio.rows(); ++f) {
        acc(field.d(f, t)) += ratio(f, t) * model.joint[s](f, t);
      }
    }
    next.dir.col(s) = model.dir.col(s).cwiseProduct(acc);
    next.joint[s] =
        model.joint[s].cwiseProduct(gather_direction_weight(ratio, field, model.dir, s));
    normalize_slice(next.joint[s], model.joint[s]);
  }
  normalize_dir(next.dir, model.dir);
  return next;
}

double dnmf_sparse_kl(const Eigen::MatrixXd& p_obs, const DirectionField& field,
                      const DnmfModel& model) {
  return kl_divergence(p_obs, dnmf_sparse_marginal(model, field));
}

SeparationMask dnmf_mask(const DnmfModel& model, const DirectionField& field, MaskMode mode) {
  check_field(field, model.bins(), model.frames(), model.directions());
  std::vector<Eigen::MatrixXd> weighted(model.sources());
  for (int s = 0; s < model.sources(); ++s) {
    if (mode == MaskMode::kMarginal) {
      weighted[s] = model.dir.col(s).sum() * model.joint[s];
    } else {
      weighted[s].resize(model.bins(), model.frames());
      for (Eigen::Index t = 0; t < weighted[s].cols(); ++t) {
        for (Eigen::Index f = 0; f < weighted[s].rows(); ++f) {
          weighted[s](f, t) = model.dir(field.d(f, t), s) * model.joint[s](f, t);
        }
      }
    }
  }
  return mask_from_slices(weighted);
}

std::vector<DirectionSummary> source_direction_summary(const Eigen::MatrixXd& dir) {
  const int directions = static_cast<int>(dir.rows());
  const int sources = static_cast<int>(dir.cols());
  if (directions <= 0 || sources <= 0) throw std::invalid_argument("empty direction factor");
  std::vector<DirectionSummary> out;
  out.reserve(sources);
  for (int s = 0; s < sources; ++s) {
    DirectionSummary entry;
    entry.source = s;
    const double mass = dir.col(s).sum();
    double cx = 0.0;
    double cy = 0.0;
    for (int d = 0; d < directions; ++d) {
      const double theta = 2.0 * M_PI * (d + 0.5) / directions;
      cx += dir(d, s) * std::cos(theta);
      cy += dir(d, s) * std::sin(theta);
    }
    if (mass < 1e-12) {
      entry.azimuth = M_PI / directions;  // center of arc 0
      entry.concentration = 0.0;
      entry.degenerate = true;
    } else {
      cx /= mass;
      cy /= mass;
      entry.concentration = std::hypot(cx, cy);
      double az = std::atan2(cy, cx);
      if (az < 0.0) az += 2.0 * M_PI;
      entry.azimuth = az;
      entry.degenerate = false;
    }
    out.push_back(entry);
  }
  std::sort(out.begin(), out.end(), [](const DirectionSummary& a, const DirectionSummary& b) {
    return a.azimuth < b.azimuth || (a.azimuth == b.azimuth && a.source < b.source);
  });
  return out;
}

}  // namespace dirsep
