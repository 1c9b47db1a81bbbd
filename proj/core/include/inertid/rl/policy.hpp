#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "inertid/rl/mlp.hpp"

namespace inertid::rl {

/// PPO settings. Defaults follow the training table used for the actuation
/// sequence optimiser; the remaining ones are the usual PPO library defaults.
struct PpoHyperparams {
  int n_steps = 2048;
  int batch_size = 64;
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  double ent_coef = 0.15;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;
  int n_epochs = 10;
  int hidden_units = 64;
  double log_std_init = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-5;
  bool normalize_advantage = true;

  bool operator==(const PpoHyperparams&) const = default;
};

void validate(const PpoHyperparams& hp);

/// Gaussian actor and value critic over a one-hot slot index.
///
/// All trainable values sit in one flat vector `theta`:
/// [policy mean network | log_std (action_dim) | value network].
struct PolicyParams {
  PolicyParams() = default;
  PolicyParams(int n_observations, int action_dim, const PpoHyperparams& hp,
               std::uint64_t seed);

  int n_observations = 0;
  int action_dim = 0;
  PpoHyperparams hyper;
  Mlp policy_net;
  Mlp value_net;
  Eigen::VectorXd theta;

  // Adam state, same layout as theta.
  Eigen::VectorXd adam_m;
  Eigen::VectorXd adam_v;
  std::int64_t adam_step = 0;

  int log_std_offset() const { return policy_net.parameter_count(); }
  int value_offset() const { return log_std_offset() + action_dim; }

  Eigen::VectorXd one_hot(int observation) const;
  /// One-hot columns for a batch of observations.
  Eigen::MatrixXd one_hot(const std::vector<int>& observations) const;

  Eigen::VectorXd mean(int observation) const;
  Eigen::VectorXd log_std() const { return theta.segment(log_std_offset(), action_dim); }
  double value(int observation) const;
};

/// Log density of a diagonal Gaussian at `x`.
double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std);

/// Entropy of a diagonal Gaussian with the given log standard deviations.
double gaussian_entropy(const Eigen::VectorXd& log_std);

struct PolicySample {
  Eigen::VectorXd action;  // raw, before clamping to the action box
  double log_prob = 0.0;
};

PolicySample policy_sample(const PolicyParams& params, int observation,
                           std::mt19937_64& rng);

/// E[clamp(X, 0, 1)] for X ~ N(mean, exp(log_std)^2).
double expected_unit_clamp(double mean, double log_std);

}  // namespace inertid::rl
