// src/bss_eval.cpp

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

#include "bss_eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dirsep {

namespace {

double db_ratio(double num, double den) {
  if (num <= 0.0) return -kDbCap;
  // Error terms this far below the signal are solver round-off from an
  // exact reconstruction, not a measurement.
  if (den <= num * 1e-24) return kDbCap;
  return std::clamp(10.0 * std::log10(num / den), -kDbCap, kDbCap);
}

// Cross-correlations and projections over length N + L - 1, where every
// delayed copy of a reference fits without truncation; the Gram matrix
// of the delayed copies is then exactly block Toeplitz.
struct ProjectionContext {
  int num_refs = 0;
  int len = 0;          // common signal length N
  int filter_len = 0;   // L
  int padded_len = 0;   // N + L - 1
  // xcorr[j][jp] has 2L-1 entries; index l + L - 1 holds
  // sum_m refs[j][m + l] * refs[jp][m].
  std::vector<std::vector<Eigen::VectorXd>> xcorr;
  Eigen::MatrixXd gram;  // (S*L) x (S*L), row/col index j*L + tau
  Eigen::LDLT<Eigen::MatrixXd> full_solver;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> block_solvers;  // per reference
  bool full_jittered = false;
};

double lagged_dot(const std::vector<double>& a, const std::vector<double>& b, int lag) {
  // sum_m a[m + lag] * b[m]
  const int n = static_cast<int>(a.size());
  double acc = 0.0;
  const int m_lo = std::max(0, -lag);
  const int m_hi = std::min(n, n - lag);
  for (int m = m_lo; m < m_hi; ++m) acc += a[m + lag] * b[m];
  return acc;
}

Eigen::LDLT<Eigen::MatrixXd> make_solver(const Eigen::MatrixXd& g, bool* jittered) {
  Eigen::LDLT<Eigen::MatrixXd> solver(g);
  // Probe the factorization with a ones vector; fall back to a jittered
  // diagonal when the system is numerically singular (e.g. identical
  // references).
  const Eigen::VectorXd probe = Eigen::VectorXd::Ones(g.rows());
  const Eigen::VectorXd x = solver.solve(probe);
  const double resid = (g * x - probe).norm() / probe.norm();
  if (solver.info() == Eigen::Success && resid <= 1e-8) {
    if (jittered != nullptr) *jittered = false;
    return solver;
  }
  const double jitter = 1e-10 * g.trace() / static_cast<double>(g.rows());
  Eigen::MatrixXd gj = g;
  gj.diagonal().array() += std::max(jitter, 1e-300);
  if (jittered != nullptr) *jittered = true;
  return Eigen::LDLT<Eigen::MatrixXd>(gj);
}

ProjectionContext make_context(const std::vector<std::vector<double>>& references,
                               int filter_length) {
  if (references.empty()) throw std::invalid_argument("no reference signals");
  if (filter_length < 1) throw std::invalid_argument("filter length must be positive");
  ProjectionContext ctx;
  ctx.num_refs = static_cast<int>(references.size());
  ctx.len = static_cast<int>(references[0].size());
  ctx.filter_len = filter_length;
  ctx.padded_len = ctx.len + filter_length - 1;
  if (ctx.len == 0) throw std::invalid_argument("empty reference signal");
  for (const std::vector<double>& r : references) {
    if (static_cast<int>(r.size()) != ctx.len) {
      throw std::invalid_argument("reference signals differ in length");
    }
    double energy = 0.0;
    for (double v : r) energy += v * v;
    if (energy <= 0.0) throw std::runtime_error("degenerate reference");
  }
  const int L = filter_length;
  ctx.xcorr.assign(ctx.num_refs, std::vector<Eigen::VectorXd>(ctx.num_refs));
  for (int j = 0; j < ctx.num_refs; ++j) {
    for (int jp = 0; jp < ctx.num_refs; ++jp) {
      Eigen::VectorXd xc(2 * L - 1);
      for (int lag = -(L - 1); lag <= L - 1; ++lag) {
        xc(lag + L - 1) = lagged_dot(references[j], references[jp], lag);
      }
      ctx.xcorr[j][jp] = xc;
    }
  }
  const int dim = ctx.num_refs * L;
  ctx.gram.resize(dim, dim);
  for (int j = 0; j < ctx.num_refs; ++j) {
    for (int jp = 0; jp < ctx.num_refs; ++jp) {
      for (int tau = 0; tau < L; ++tau) {
        for (int taup = 0; taup < L; ++taup) {
          // <delay(refs[j], tau), delay(refs[jp], taup)> over the padded
          // support equals xcorr at lag taup - tau.
          ctx.gram(j * L + tau, jp * L + taup) = ctx.xcorr[j][jp](taup - tau + L - 1);
        }
      }
    }
  }
  ctx.full_solver = make_solver(ctx.gram, &ctx.full_jittered);
  ctx.block_solvers.reserve(ctx.num_refs);
  for (int j = 0; j < ctx.num_refs; ++j) {
    ctx.block_solvers.push_back(
        make_solver(ctx.gram.block(j * L, j * L, L, L), nullptr));
  }
  return ctx;
}

// b[(j, tau)] = <estimate (padded), delay(refs[j], tau)>.
Eigen::VectorXd correlate_estimate(const ProjectionContext& ctx,
                                   const std::vector<std::vector<double>>& references,
                                   const std::vector<double>& estimate) {
  const int L = ctx.filter_len;
  Eigen::VectorXd b(ctx.num_refs * L);
  for (int j = 0; j < ctx.num_refs; ++j) {
    for (int tau = 0; tau < L; ++tau) {
      b(j * L + tau) = lagged_dot(estimate, references[j], tau);
    }
  }
  return b;
}

// Accumulates coeff-weighted delayed copies of one reference.
void add_filtered(std::vector<double>& out, const std::vector<double>& ref,
                  const Eigen::VectorXd& coeffs, int coeff_offset, int filter_len) {
  const int n = static_cast<int>(ref.size());
  for (int tau = 0; tau < filter_len; ++tau) {
    const double c = coeffs(coeff_offset + tau);
    if (c == 0.0) continue;
    for (int m = 0; m < n; ++m) out[m + tau] += c * ref[m];
  }
}

double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

BssScores score_pair(const ProjectionContext& ctx,
                     const std::vector<std::vector<double>>& references, int target,
                     const std::vector<double>& estimate) {
  const int L = ctx.filter_len;
  const Eigen::VectorXd b = correlate_estimate(ctx, references, estimate);

  const Eigen::VectorXd alpha_target =
      ctx.block_solvers[target].solve(b.segment(target * L, L));
  const Eigen::VectorXd alpha_all = ctx.full_solver.solve(b);

  std::vector<double> s_target(ctx.padded_len, 0.0);
  add_filtered(s_target, references[target], alpha_target, 0, L);
  std::vector<double> p_all(ctx.padded_len, 0.0);
  for (int j = 0; j < ctx.num_refs; ++j) {
    add_filtered(p_all, references[j], alpha_all, j * L, L);
  }

  std::vector<double> e_interf(ctx.padded_len);
  std::vector<double> e_artif(ctx.padded_len);
  std::vector<double> target_plus_interf(ctx.padded_len);
  for (int n = 0; n < ctx.padded_len; ++n) {
    const double est = n < ctx.len ? estimate[n] : 0.0;
    e_interf[n] = p_all[n] - s_target[n];
    e_artif[n] = est - p_all[n];
    target_plus_interf[n] = p_all[n];
  }

  const double target_energy = energy(s_target);
  const double interf_energy = energy(e_interf);
  const double artif_energy = energy(e_artif);
  double distortion_energy = 0.0;
  for (int n = 0; n < ctx.padded_len; ++n) {
    const double v = e_interf[n] + e_artif[n];
    distortion_energy += v * v;
  }

  BssScores scores;
  scores.sdr = db_ratio(target_energy, distortion_energy);
  scores.sir = db_ratio(target_energy, interf_energy);
  scores.sar = db_ratio(energy(target_plus_interf), artif_energy);
  return scores;
}

}  // namespace

BssScores bss_eval_single(const std::vector<std::vector<double>>& references, int target,
                          const std::vector<double>& estimate, int filter_length) {
  if (target < 0 || target >= static_cast<int>(references.size())) {
    throw std::invalid_argument("target reference index out of range");
  }
  const ProjectionContext ctx = make_context(references, filter_length);
  if (static_cast<int>(estimate.size()) != ctx.len) {
    throw std::invalid_argument("estimate length does not match references");
  }
  return score_pair(ctx, references, target, estimate);
}

BssEvalResult bss_eval(const std::vector<std::vector<double>>& references,
                       const std::vector<std::vector<double>>& estimates,
                       int filter_length) {
  if (references.size() != estimates.size()) {
    throw std::invalid_argument("estimate count does not match reference count");
  }
  const ProjectionContext ctx = make_context(references, filter_length);
  const int sources = ctx.num_refs;
  for (const std::vector<double>& e : estimates) {
    if (static_cast<int>(e.size()) != ctx.len) {
      throw std::invalid_argument("estimate length does not match references");
    }
  }

  std::vector<std::vector<BssScores>> table(sources, std::vector<BssScores>(sources));
  for (int i = 0; i < sources; ++i) {
    for (int j = 0; j < sources; ++j) {
      table[i][j] = score_pair(ctx, references, j, estimates[i]);
    }
  }

  // perm[j] = estimate assigned to reference j; keep the permutation
  // with the strictly best mean SIR, so ties resolve to the first in
  // lexicographic order.
  std::vector<int> perm(sources);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_sir = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int j = 0; j < sources; ++j) total += table[perm[j]][j].sir;
    if (total > best_sir) {
      best_sir = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  BssEvalResult result;
  result.assignment = best;
  result.filter_length = filter_length;
  result.per_source.resize(sources);
  for (int j = 0; j < sources; ++j) result.per_source[j] = table[best[j]][j];
  return result;
}

}  // namespace dirsep
