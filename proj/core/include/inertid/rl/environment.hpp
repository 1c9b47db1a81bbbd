#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inertid/actuators.hpp"
#include "inertid/dynamics.hpp"
#include "inertid/tsc/clustering.hpp"

namespace inertid::rl {

struct StepInfo {
  double f1 = 0.0;        // classifier score P after this step
  double c_t = 0.0;
  double c_gt = 0.0;
  double c_rw = 0.0;
  double thruster_util = 0.0;  // mean applied duty
  double wheel_util = 0.0;     // mean |voltage fraction|
};

struct StepResult {
  int observation = 0;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;

  bool done() const { return terminated || truncated; }
};

/// Episodic environment with a discrete observation (the slot index) and a
/// box action space.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int observation_count() const = 0;
  virtual int action_dim() const = 0;
  virtual int reset(std::uint64_t episode_seed) = 0;
  virtual StepResult step(std::span<const double> raw_action) = 0;
  /// Clamps a raw action into the action box.
  virtual std::vector<double> clamp(std::span<const double> raw_action) const = 0;
};

/// Step reward weights: R = -a0 C_t - a1 C_GT - a2 C_RW + a3 P.
struct RewardWeights {
  double a0 = 1.0;
  double a1 = 0.01;
  double a2 = 0.01;
  double a3 = 10.0;

  /// a0, a3 >> a1, a2: finish identification quickly with any actuator.
  static RewardWeights speed() { return {1.0, 0.01, 0.01, 10.0}; }
  /// a1 >> a2: same, but gas is expensive.
  static RewardWeights fuel() { return {1.0, 1.0, 0.01, 10.0}; }

  double reward(double c_t, double c_gt, double c_rw, double p) const {
    return -a0 * c_t - a1 * c_gt - a2 * c_rw + a3 * p;
  }

  bool operator==(const RewardWeights&) const = default;
};

/// Throws ValidationError unless all weights are non-negative and a3 > 0.
void validate(const RewardWeights& w);

struct EnvSpec {
  int n_slots = 10;
  dynamics::Plant plant;  // actuators; inertia replaced per configuration
  std::vector<dynamics::LabelledConfig> configs;
  int replicates_per_config = 2;
  RewardWeights weights;
  dynamics::SimConfig sim;
  tsc::KMeansOptions classifier;  // k is forced to the configuration count
  int jobs = 1;

  int action_dim() const {
    return static_cast<int>(plant.thrusters.count() + plant.wheels.size());
  }
};

void validate(const EnvSpec& spec);

/// Runs every configuration x replicate simulation in lockstep, one slot per
/// step, and scores the accumulated responses with the soft-DTW classifier.
/// The agent only ever sees the slot index.
class IdentificationEnv final : public Environment {
 public:
  explicit IdentificationEnv(EnvSpec spec);

  int observation_count() const override { return spec_.n_slots; }
  int action_dim() const override { return spec_.action_dim(); }
  int reset(std::uint64_t episode_seed) override;
  StepResult step(std::span<const double> raw_action) override;
  std::vector<double> clamp(std::span<const double> raw_action) const override;

  /// Classifier settings used from now on (e.g. more restarts for evaluation).
  void set_classifier(const tsc::KMeansOptions& options);

  const EnvSpec& spec() const { return spec_; }
  bool active() const { return active_; }
  int step_index() const { return step_; }
  const std::vector<dynamics::Simulator>& simulators() const { return sims_; }
  /// Classifier fitted at the most recent step.
  const tsc::ClusterModel& last_model() const { return model_; }

 private:
  EnvSpec spec_;
  std::vector<dynamics::Simulator> sims_;
  std::vector<std::string> truth_;
  tsc::ClusterModel model_;
  std::uint64_t episode_seed_ = 0;
  int step_ = 0;
  bool active_ = false;
};

/// Seed of simulation (config, replicate) within an episode.
std::uint64_t episode_sim_seed(std::uint64_t episode_seed, std::size_t config,
                               std::size_t replicate);

}  // namespace inertid::rl
