#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>

#include "inertid/rl/policy.hpp"

namespace inertid::rl {

struct Transition {
  int observation = 0;
  Eigen::VectorXd action;  // raw sample, pre-clamp
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  double value = 0.0;
  double log_prob = 0.0;

  bool done() const { return terminated || truncated; }
};

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

/// Generalised advantage estimation over a rollout that may span several
/// episodes. `last_value` bootstraps the final transition when its episode is
/// still running; any ended episode (terminated or truncated) is not
/// bootstrapped. Advantages are returned unnormalised.
GaeResult compute_gae(const std::vector<Transition>& rollout, double last_value,
                      double gamma, double lambda);

/// One minibatch in loss-ready form.
struct Minibatch {
  std::vector<int> observations;
  Eigen::MatrixXd actions;  // action_dim x B
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // already normalised if requested
  Eigen::VectorXd returns;
};

struct LossTerms {
  double total = 0.0;
  double policy = 0.0;   // clipped surrogate, negated
  double value = 0.0;    // mean squared error
  double entropy = 0.0;  // mean entropy
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  Eigen::VectorXd ratios;
};

/// PPO loss at parameters `theta`:
/// -mean(min(r A, clip(r, 1-c, 1+c) A)) + vf_coef * mse - ent_coef * entropy.
/// When `grad` is non-null it receives dLoss/dtheta.
LossTerms ppo_loss(const PolicyParams& params, const Eigen::VectorXd& theta,
                   const Minibatch& batch, Eigen::VectorXd* grad);

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;  // before clipping, last minibatch
  int minibatches = 0;
  // Largest |ratio - 1| in the very first minibatch; zero up to rounding.
  double first_batch_ratio_error = 0.0;
  bool aborted = false;
};

/// Clipped-surrogate PPO: n_epochs passes of shuffled minibatches, global
/// gradient-norm clipping and Adam. Requires exactly n_steps transitions.
/// A non-finite loss aborts the update and leaves the current minibatch's
/// parameters untouched.
UpdateDiagnostics ppo_update(PolicyParams& params, const std::vector<Transition>& rollout,
                             const GaeResult& gae, std::mt19937_64& rng);

}  // namespace inertid::rl
