#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "gridsched/common/rng.hpp"
#include "gridsched/gridworld/observation.hpp"
#include "gridsched/gridworld/types.hpp"

namespace gridsched {

inline constexpr int kHiddenDim = 64;

struct NumericalFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-layer tanh MLP trunk with separate policy and value heads.
struct MlpParams {
  Eigen::MatrixXd W1;      // H x D
  Eigen::VectorXd b1;      // H
  Eigen::MatrixXd W_pi;    // A x H
  Eigen::VectorXd b_pi;    // A
  Eigen::RowVectorXd W_v;  // 1 x H
  double b_v = 0.0;

  static MlpParams zeros() {
    MlpParams p;
    p.W1 = Eigen::MatrixXd::Zero(kHiddenDim, kObservationDim);
    p.b1 = Eigen::VectorXd::Zero(kHiddenDim);
    p.W_pi = Eigen::MatrixXd::Zero(kActionCount, kHiddenDim);
    p.b_pi = Eigen::VectorXd::Zero(kActionCount);
    p.W_v = Eigen::RowVectorXd::Zero(kHiddenDim);
    p.b_v = 0.0;
    return p;
  }

  bool all_finite() const {
    return W1.allFinite() && b1.allFinite() && W_pi.allFinite() && b_pi.allFinite() &&
           W_v.allFinite() && std::isfinite(b_v);
  }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(W1.size()) + b1.size() + W_pi.size() + b_pi.size() +
           W_v.size() + 1;
  }
};

namespace detail {

inline void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, Rng& rng, double scale) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = (2.0 * rng.next_double() - 1.0) * scale;
    }
  }
}

}  // namespace detail

// Xavier-style uniform trunk init; heads scaled down so the initial policy
// is near uniform and values near zero.
inline MlpParams init_params(Rng& rng) {
  MlpParams p = MlpParams::zeros();
  detail::fill_uniform(p.W1, rng, std::sqrt(6.0 / (kObservationDim + kHiddenDim)));
  detail::fill_uniform(p.W_pi, rng, 0.01);
  Eigen::MatrixXd wv(1, kHiddenDim);
  detail::fill_uniform(wv, rng, 0.01);
  p.W_v = wv.row(0);
  return p;
}

struct PolicyOutput {
  Eigen::VectorXd probs;      // A
  Eigen::VectorXd log_probs;  // A
  double value = 0.0;
};

inline Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = std::log((logits.array() - m).exp().sum()) + m;
  return logits.array() - lse;
}

inline PolicyOutput policy_forward(const MlpParams& p, const Observation& obs) {
  if (static_cast<int>(obs.size()) != kObservationDim) {
    throw std::invalid_argument("observation has wrong dimension");
  }
  const Eigen::Map<const Eigen::VectorXd> x(obs.data(), kObservationDim);
  const Eigen::VectorXd h = (p.W1 * x + p.b1).array().tanh();
  const Eigen::VectorXd logits = p.W_pi * h + p.b_pi;
  PolicyOutput out;
  out.log_probs = log_softmax(logits);
  out.probs = out.log_probs.array().exp();
  out.value = p.W_v * h + p.b_v;
  if (!out.probs.allFinite() || !std::isfinite(out.value)) {
    throw NumericalFault("non-finite policy output");
  }
  return out;
}

// Inverse-CDF sample in fixed action-index order.
inline Action sample_action(const Eigen::VectorXd& probs, Rng& rng) {
  return static_cast<Action>(
      rng.sample_index(std::span<const double>(probs.data(), probs.size())));
}

inline Action greedy_action(const Eigen::VectorXd& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<Action>(best);
}

// ---- checkpoint serialization -------------------------------------------

inline nlohmann::json params_to_json(const MlpParams& p) {
  auto dump = [](const double* data, Eigen::Index n) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < n; ++i) arr.push_back(data[i]);
    return arr;
  };
  return nlohmann::json{
      {"shape", {{"input", kObservationDim}, {"hidden", kHiddenDim}, {"actions", kActionCount}}},
      {"W1", dump(p.W1.data(), p.W1.size())},
      {"b1", dump(p.b1.data(), p.b1.size())},
      {"W_pi", dump(p.W_pi.data(), p.W_pi.size())},
      {"b_pi", dump(p.b_pi.data(), p.b_pi.size())},
      {"W_v", dump(p.W_v.data(), p.W_v.size())},
      {"b_v", p.b_v},
  };
}

inline MlpParams params_from_json(const nlohmann::json& j) {
  const auto& shape = j.at("shape");
  if (shape.at("input").get<int>() != kObservationDim ||
      shape.at("hidden").get<int>() != kHiddenDim ||
      shape.at("actions").get<int>() != kActionCount) {
    throw std::invalid_argument("checkpoint shape mismatch");
  }
  MlpParams p = MlpParams::zeros();
  auto load = [](double* data, Eigen::Index n, const nlohmann::json& arr) {
    if (static_cast<Eigen::Index>(arr.size()) != n) {
      throw std::invalid_argument("checkpoint array size mismatch");
    }
    for (Eigen::Index i = 0; i < n; ++i) data[i] = arr.at(i).get<double>();
  };
  load(p.W1.data(), p.W1.size(), j.at("W1"));
  load(p.b1.data(), p.b1.size(), j.at("b1"));
  load(p.W_pi.data(), p.W_pi.size(), j.at("W_pi"));
  load(p.b_pi.data(), p.b_pi.size(), j.at("b_pi"));
  load(p.W_v.data(), p.W_v.size(), j.at("W_v"));
  p.b_v = j.at("b_v").get<double>();
  return p;
}

}  // namespace gridsched
