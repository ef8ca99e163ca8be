#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gridsched/common/rng.hpp"
#include "gridsched/learner/gae.hpp"
#include "gridsched/learner/mlp.hpp"
#include "gridsched/learner/rollout.hpp"

namespace gridsched {

struct TrainConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double learning_rate = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 4;
  int minibatch = 64;
  double value_coeff = 0.5;
  double entropy_coeff = 0.01;
  double grad_clip_norm = 0.5;
  int rollout_length = 256;
  bool stochastic_eval = true;
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total_loss = 0.0;
};

struct Grads {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd W_pi;
  Eigen::VectorXd b_pi;
  Eigen::RowVectorXd W_v;
  double b_v = 0.0;

  static Grads zeros() {
    Grads g;
    g.W1 = Eigen::MatrixXd::Zero(kHiddenDim, kObservationDim);
    g.b1 = Eigen::VectorXd::Zero(kHiddenDim);
    g.W_pi = Eigen::MatrixXd::Zero(kActionCount, kHiddenDim);
    g.b_pi = Eigen::VectorXd::Zero(kActionCount);
    g.W_v = Eigen::RowVectorXd::Zero(kHiddenDim);
    g.b_v = 0.0;
    return g;
  }

  double squared_norm() const {
    return W1.squaredNorm() + b1.squaredNorm() + W_pi.squaredNorm() + b_pi.squaredNorm() +
           W_v.squaredNorm() + b_v * b_v;
  }

  void scale(double s) {
    W1 *= s;
    b1 *= s;
    W_pi *= s;
    b_pi *= s;
    W_v *= s;
    b_v *= s;
  }
};

// Minibatch in column-major form ready for the batched forward pass.
struct FlatBatch {
  Eigen::MatrixXd obs;  // D x B
  std::vector<int> actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // standardized
  Eigen::VectorXd returns;

  Eigen::Index size() const { return obs.cols(); }
};

inline FlatBatch make_flat_batch(const RolloutBuffer& buffer,
                                 const std::vector<double>& std_advantages,
                                 const std::vector<double>& returns,
                                 const std::vector<std::size_t>& indices) {
  const Eigen::Index b = static_cast<Eigen::Index>(indices.size());
  FlatBatch fb;
  fb.obs.resize(kObservationDim, b);
  fb.actions.resize(indices.size());
  fb.old_log_probs.resize(b);
  fb.advantages.resize(b);
  fb.returns.resize(b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const std::size_t i = indices[static_cast<std::size_t>(k)];
    const Transition& tr = buffer.transitions[i];
    fb.obs.col(k) = Eigen::Map<const Eigen::VectorXd>(tr.observation.data(), kObservationDim);
    fb.actions[static_cast<std::size_t>(k)] = tr.action;
    fb.old_log_probs[k] = tr.log_prob;
    fb.advantages[k] = std_advantages[i];
    fb.returns[k] = returns[i];
  }
  return fb;
}

// Clipped-surrogate PPO loss averaged over the batch, with the full analytic
// backward pass when `grads` is non-null. Gradient of the policy term flows
// only through the unclipped branch (zero when the clipped branch is active).
inline LossStats ppo_loss_and_grad(const MlpParams& p, const FlatBatch& batch,
                                   const TrainConfig& cfg, Grads* grads) {
  const Eigen::Index b = batch.size();
  const double inv_b = 1.0 / static_cast<double>(b);

  const Eigen::MatrixXd h = ((p.W1 * batch.obs).colwise() + p.b1).array().tanh();
  const Eigen::MatrixXd z = (p.W_pi * h).colwise() + p.b_pi;
  const Eigen::RowVectorXd values = (p.W_v * h).array() + p.b_v;

  // column-wise log-softmax
  const Eigen::RowVectorXd zmax = z.colwise().maxCoeff();
  const Eigen::MatrixXd shifted = z.rowwise() - zmax;
  const Eigen::RowVectorXd lse = shifted.array().exp().colwise().sum().log();
  const Eigen::MatrixXd logp = shifted.rowwise() - lse;
  const Eigen::MatrixXd probs = logp.array().exp();

  LossStats stats;
  Eigen::MatrixXd dz;
  Eigen::RowVectorXd dv;
  if (grads) {
    dz = Eigen::MatrixXd::Zero(kActionCount, b);
    dv = Eigen::RowVectorXd::Zero(b);
  }

  for (Eigen::Index k = 0; k < b; ++k) {
    const int a = batch.actions[static_cast<std::size_t>(k)];
    const double adv = batch.advantages[k];
    const double ratio = std::exp(logp(a, k) - batch.old_log_probs[k]);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double surr1 = ratio * adv;
    const double surr2 = clipped * adv;
    stats.policy_loss += -std::min(surr1, surr2) * inv_b;

    double ent = 0.0;
    for (int i = 0; i < kActionCount; ++i) ent -= probs(i, k) * logp(i, k);
    stats.entropy += ent * inv_b;

    const double verr = values[k] - batch.returns[k];
    stats.value_loss += verr * verr * inv_b;

    if (grads) {
      // d(-min)/dlogp_a: active only on the unclipped branch
      if (surr1 <= surr2) {
        const double g = -ratio * adv * inv_b;
        dz.col(k) -= g * probs.col(k);
        dz(a, k) += g;
      }
      // -entropy_coeff * H  ->  +c_e * p_i * (logp_i + H)
      dz.col(k) +=
          (cfg.entropy_coeff * inv_b) * (probs.col(k).array() * (logp.col(k).array() + ent)).matrix();
      dv[k] = 2.0 * cfg.value_coeff * verr * inv_b;
    }
  }
  stats.total_loss =
      stats.policy_loss + cfg.value_coeff * stats.value_loss - cfg.entropy_coeff * stats.entropy;

  if (grads) {
    grads->W_pi = dz * h.transpose();
    grads->b_pi = dz.rowwise().sum();
    grads->W_v = dv * h.transpose();
    grads->b_v = dv.sum();
    const Eigen::MatrixXd dh = p.W_pi.transpose() * dz + p.W_v.transpose() * dv;
    const Eigen::MatrixXd dpre = dh.array() * (1.0 - h.array().square());
    grads->W1 = dpre * batch.obs.transpose();
    grads->b1 = dpre.rowwise().sum();
  }
  return stats;
}

inline double ppo_loss(const MlpParams& p, const FlatBatch& batch, const TrainConfig& cfg) {
  return ppo_loss_and_grad(p, batch, cfg, nullptr).total_loss;
}

struct AdamState {
  Grads m = Grads::zeros();
  Grads v = Grads::zeros();
  long long t = 0;
};

inline void adam_step(MlpParams& p, const Grads& g, AdamState& adam, const TrainConfig& cfg) {
  adam.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.t));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.t));
  const double lr = cfg.learning_rate;
  auto upd = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v = (cfg.adam_beta2 * v.array() + (1.0 - cfg.adam_beta2) * grad.array().square()).matrix();
    param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.adam_eps);
  };
  upd(p.W1, g.W1, adam.m.W1, adam.v.W1);
  upd(p.b1, g.b1, adam.m.b1, adam.v.b1);
  upd(p.W_pi, g.W_pi, adam.m.W_pi, adam.v.W_pi);
  upd(p.b_pi, g.b_pi, adam.m.b_pi, adam.v.b_pi);
  upd(p.W_v, g.W_v, adam.m.W_v, adam.v.W_v);
  adam.m.b_v = cfg.adam_beta1 * adam.m.b_v + (1.0 - cfg.adam_beta1) * g.b_v;
  adam.v.b_v = cfg.adam_beta2 * adam.v.b_v + (1.0 - cfg.adam_beta2) * g.b_v * g.b_v;
  p.b_v -= lr * (adam.m.b_v / bc1) / (std::sqrt(adam.v.b_v / bc2) + cfg.adam_eps);
}

// epochs x shuffled minibatches over the buffer; advantages are standardized
// once over the whole buffer, gradients clipped by global norm. A non-finite
// loss or gradient aborts the update, leaving params untouched.
inline LossStats ppo_update(MlpParams& params, AdamState& adam, const RolloutBuffer& buffer,
                            const std::vector<double>& raw_advantages,
                            const std::vector<double>& returns, const TrainConfig& cfg,
                            Rng& rng) {
  const std::size_t n = buffer.transitions.size();
  if (raw_advantages.size() != n || returns.size() != n) {
    throw std::invalid_argument("advantage/return length mismatch");
  }
  const std::vector<double> std_adv = standardize_advantages(raw_advantages);

  const MlpParams backup = params;
  const AdamState adam_backup = adam;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  LossStats mean_stats;
  int batches = 0;
  Grads grads = Grads::zeros();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own rng for cross-platform determinism
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_int(static_cast<int>(i)));
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop));
      const FlatBatch fb = make_flat_batch(buffer, std_adv, returns, idx);
      const LossStats stats = ppo_loss_and_grad(params, fb, cfg, &grads);
      if (!std::isfinite(stats.total_loss) || !std::isfinite(grads.squared_norm())) {
        params = backup;
        adam = adam_backup;
        throw NumericalFault("non-finite loss or gradient in ppo_update");
      }
      const double norm = std::sqrt(grads.squared_norm());
      if (norm > cfg.grad_clip_norm) grads.scale(cfg.grad_clip_norm / norm);
      adam_step(params, grads, adam, cfg);
      mean_stats.policy_loss += stats.policy_loss;
      mean_stats.value_loss += stats.value_loss;
      mean_stats.entropy += stats.entropy;
      mean_stats.total_loss += stats.total_loss;
      ++batches;
    }
  }
  if (batches > 0) {
    const double inv = 1.0 / batches;
    mean_stats.policy_loss *= inv;
    mean_stats.value_loss *= inv;
    mean_stats.entropy *= inv;
    mean_stats.total_loss *= inv;
  }
  if (!params.all_finite()) {
    params = backup;
    adam = adam_backup;
    throw NumericalFault("non-finite parameters after ppo_update");
  }
  return mean_stats;
}

}  // namespace gridsched
