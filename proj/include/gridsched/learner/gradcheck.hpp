#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gridsched/common/rng.hpp"
#include "gridsched/learner/ppo.hpp"

namespace gridsched {

namespace detail {

struct Coord {
  int block;  // 0..5 = W1, b1, W_pi, b_pi, W_v, b_v
  Eigen::Index index;
};

inline double* block_data(MlpParams& p, int block) {
  switch (block) {
    case 0: return p.W1.data();
    case 1: return p.b1.data();
    case 2: return p.W_pi.data();
    case 3: return p.b_pi.data();
    case 4: return p.W_v.data();
    default: return &p.b_v;
  }
}

inline const double* grad_data(const Grads& g, int block) {
  switch (block) {
    case 0: return g.W1.data();
    case 1: return g.b1.data();
    case 2: return g.W_pi.data();
    case 3: return g.b_pi.data();
    case 4: return g.W_v.data();
    default: return &g.b_v;
  }
}

inline Eigen::Index block_size(const MlpParams& p, int block) {
  switch (block) {
    case 0: return p.W1.size();
    case 1: return p.b1.size();
    case 2: return p.W_pi.size();
    case 3: return p.b_pi.size();
    case 4: return p.W_v.size();
    default: return 1;
  }
}

}  // namespace detail

// Central-difference check of the analytic PPO gradient on one batch.
// Samples a stratified random subset of coordinates (at least min_coords,
// covering every parameter block) and returns the worst relative error.
// corrupt_wv doubles the analytic W_v gradient as a negative control.
inline double gradient_check(const MlpParams& params, const FlatBatch& batch,
                             const TrainConfig& cfg, Rng& rng, int min_coords = 200,
                             double h = 1e-5, bool corrupt_wv = false) {
  Grads analytic = Grads::zeros();
  ppo_loss_and_grad(params, batch, cfg, &analytic);
  if (corrupt_wv) analytic.W_v *= 2.0;

  std::vector<detail::Coord> coords;
  const int per_block = 48;
  for (int block = 0; block < 6; ++block) {
    const Eigen::Index sz = detail::block_size(params, block);
    const Eigen::Index take = std::min<Eigen::Index>(sz, per_block);
    for (Eigen::Index k = 0; k < take; ++k) {
      coords.push_back({block, static_cast<Eigen::Index>(
                                   rng.next_int(static_cast<int>(sz)))});
    }
  }
  while (static_cast<int>(coords.size()) < min_coords) {
    coords.push_back({0, static_cast<Eigen::Index>(
                             rng.next_int(static_cast<int>(params.W1.size())))});
  }

  MlpParams work = params;
  double max_rel = 0.0;
  for (const auto& c : coords) {
    double* slot = detail::block_data(work, c.block) + c.index;
    const double orig = *slot;
    *slot = orig + h;
    const double lp = ppo_loss(work, batch, cfg);
    *slot = orig - h;
    const double lm = ppo_loss(work, batch, cfg);
    *slot = orig;
    const double numeric = (lp - lm) / (2.0 * h);
    const double ga = detail::grad_data(analytic, c.block)[c.index];
    const double rel = std::abs(ga - numeric) / std::max({std::abs(ga), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace gridsched
