#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inertid/actuators.hpp"
#include "inertid/dynamics.hpp"
#include "inertid/inertia.hpp"
#include "inertid/rl/environment.hpp"
#include "inertid/rl/policy.hpp"
#include "inertid/tsc/clustering.hpp"

namespace inertid::harness {

/// One rigid body of the stack. The tensor about its own CM is either given
/// directly or derived from solid-box dimensions.
struct BodyConfig {
  std::string label;
  double mass_kg = 0.0;
  Vec3 position_m = Vec3::Zero();
  std::optional<Vec3> box_m;
  std::optional<Mat3> inertia_kg_m2;
  Mat3 orientation = Mat3::Identity();

  inertia::BodySpec spec() const;
  bool operator==(const BodyConfig&) const;
};

/// A candidate configuration: the subset of the stack still attached.
struct Configuration {
  std::string label;
  std::vector<std::string> bodies;
  bool operator==(const Configuration&) const = default;
};

struct TscConfig {
  double gamma = 1.0;
  int n_init = 5;
  int n_init_training = 1;
  int max_iter = 50;
  double tol = 1e-5;
  int barycenter_max_iter = 30;
  int downsample = 50;
  int replicates = 5;
  bool operator==(const TscConfig&) const = default;
};

struct SmokeConfig {
  int n_slots = 6;
  int replicates_per_config = 2;
  int n_steps = 128;
  int updates = 20;
  int dataset_replicates = 2;
  std::vector<double> robustness_multipliers = {0.0, 1.0, 2.0};
  int robustness_eval_runs = 10;
  bool operator==(const SmokeConfig&) const = default;
};

struct RlConfig {
  std::string scenario = "speed";  // speed | fuel | custom
  rl::RewardWeights custom_weights;
  int n_slots = 10;
  int replicates_per_config = 2;
  std::int64_t total_steps = 204800;
  rl::PpoHyperparams ppo;
  bool operator==(const RlConfig&) const = default;
};

struct RobustnessConfig {
  std::string noise_axis = "sensor";  // sensor | actuation
  std::vector<double> multipliers = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  int eval_runs = 10;
  bool operator==(const RobustnessConfig&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::vector<BodyConfig> bodies;
  std::vector<Configuration> configurations;
  actuators::ThrusterBank thrusters = actuators::default_thruster_bank();
  std::vector<actuators::ReactionWheelModule> wheels = actuators::default_wheels();
  dynamics::SimConfig sim;
  TscConfig tsc;
  RlConfig rl;
  // Excitation for gen-data; empty selects default_sequence().
  std::vector<actuators::ActuationVector> sequence;
  RobustnessConfig robustness;
  SmokeConfig smoke;
  std::uint64_t seed = 0;

  bool operator==(const ScenarioConfig&) const;
};

/// Throws ValidationError on any structural or range violation.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_config(const std::string& json_text);
std::string serialize_config(const ScenarioConfig& config);
/// Throws NotFoundError when the file is missing, ValidationError otherwise.
ScenarioConfig load_config(const std::string& path);

/// Built-in two-payload stage: 10 t carrier, two 200 kg payloads.
ScenarioConfig falcon_stage();

/// Composed inertial parameters for every candidate configuration.
std::vector<dynamics::LabelledConfig> build_configurations(const ScenarioConfig& config);

dynamics::Plant build_plant(const ScenarioConfig& config);

/// Fixed exciting sequence: one slot per thruster at full duty followed by
/// each wheel driven at full voltage, then alternating signs.
std::vector<actuators::ActuationVector> default_sequence(std::size_t thrusters,
                                                         std::size_t wheels);

rl::RewardWeights scenario_weights(const ScenarioConfig& config, const std::string& scenario);

/// Classifier options for a given restart count.
tsc::KMeansOptions classifier_options(const ScenarioConfig& config, int n_init,
                                      std::uint64_t seed, int jobs);

/// Training environment for `scenario` with the reduced training restart count.
rl::EnvSpec env_spec(const ScenarioConfig& config, const std::string& scenario,
                     std::uint64_t classifier_seed, int jobs);

/// Replaces every budget with the smoke values.
ScenarioConfig apply_smoke(ScenarioConfig config);

}  // namespace inertid::harness
