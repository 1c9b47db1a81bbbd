#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "inertid/actuators.hpp"
#include "inertid/rl/environment.hpp"
#include "inertid/rl/policy.hpp"
#include "inertid/rl/ppo.hpp"

namespace inertid::rl {

struct EpisodeRecord {
  double reward = 0.0;
  int steps = 0;
  double final_f1 = 0.0;
  double c_gt = 0.0;
  double c_rw = 0.0;
  bool truncated = false;
};

/// One row per PPO update.
struct UpdateRecord {
  int update = 0;
  int episodes = 0;        // completed so far
  std::int64_t steps = 0;  // environment steps so far
  double mean_reward_100 = 0.0;
  double f1 = 0.0;    // mean final F1 of episodes finished in this update
  double c_gt = 0.0;  // mean per-episode totals of episodes finished in this update
  double c_rw = 0.0;
  double thruster_util = 0.0;  // mean over this update's steps
  double wheel_util = 0.0;
  UpdateDiagnostics diagnostics;
};

struct TrainingLog {
  std::vector<UpdateRecord> updates;
  std::vector<EpisodeRecord> episodes;

  /// Mean episode reward over the first / last `window` completed episodes
  /// (fewer when not enough episodes exist).
  double leading_mean(std::size_t window = 100) const;
  double trailing_mean(std::size_t window = 100) const;
};

struct TrainOptions {
  std::int64_t total_steps = 0;
  std::uint64_t seed = 0;
  /// Called after every update; may be empty.
  std::function<void(const UpdateRecord&)> on_update;
};

/// Alternates n_steps of rollout collection with ppo_update until at least
/// `total_steps` environment steps have been taken (rounded up to whole
/// rollouts).
TrainingLog train(Environment& env, PolicyParams& params, const TrainOptions& options);

/// Clamped policy mean for every slot index.
std::vector<actuators::ActuationVector> extract_sequence(const PolicyParams& params,
                                                         int n_slots, std::size_t thrusters,
                                                         std::size_t wheels);

/// Plays a fixed sequence through the environment from `seed` until the
/// episode ends or the sequence runs out.
EpisodeRecord evaluate_sequence(Environment& env,
                                const std::vector<actuators::ActuationVector>& sequence,
                                std::uint64_t seed);

struct Utilization {
  std::vector<double> thruster;  // per thruster, mean over slots
  std::vector<double> wheel;     // per wheel, mean |fraction| over slots
  double thruster_mean = 0.0;
  double wheel_mean = 0.0;
};

/// Time-averaged utilisation of a fixed sequence.
Utilization sequence_utilization(const std::vector<actuators::ActuationVector>& sequence);

/// Expected clamped thruster duty of the stochastic policy, averaged over
/// slots and thrusters (the first `thrusters` action components).
double expected_thruster_utilization(const PolicyParams& params, std::size_t thrusters);

void write_training_log_csv(std::ostream& out, const TrainingLog& log);
/// One row per completed episode, in completion order.
void write_episodes_csv(std::ostream& out, const TrainingLog& log);

}  // namespace inertid::rl
