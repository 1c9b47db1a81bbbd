#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "inertid/actuators.hpp"
#include "inertid/inertia.hpp"
#include "inertid/types.hpp"

namespace inertid::dynamics {

struct SpacecraftState {
  Vec3 omega = Vec3::Zero();  // body rates, rad/s
  std::vector<actuators::WheelState> wheels;
  double time = 0.0;
};

/// Zero body rates, wheels at rest, t = 0.
SpacecraftState rest_state(std::size_t wheels);

struct SimConfig {
  double dt = 0.01;                    // s
  double slot_duration = 5.0;          // s
  double sensor_noise_std = 2e-4;      // rad/s, additive per sample and axis
  double actuation_noise_std = 0.005;  // multiplicative, drawn once per slot
  double disturbance_torque_std = 0.0; // N m, per integration step
  double omega_limit = 0.5;            // rad/s

  bool operator==(const SimConfig&) const = default;
};

/// Throws ValidationError unless dt > 0, omega_limit > 0, noise levels are
/// non-negative and slot_duration is an integer multiple of dt.
void validate(const SimConfig& sim);
int steps_per_slot(const SimConfig& sim);

/// Inertial parameters plus the actuator set mounted on the bus.
struct Plant {
  inertia::InertialParams inertia;
  actuators::ThrusterBank thrusters = actuators::default_thruster_bank();
  std::vector<actuators::ReactionWheelModule> wheels = actuators::default_wheels();
};

struct Sample {
  double time = 0.0;
  Vec3 omega = Vec3::Zero();  // measured
};

struct Trajectory {
  std::vector<Sample> samples;
  std::string config_label;
  int replicate_index = 0;
  bool terminated = false;  // rate limit exceeded
};

struct TrajectorySet {
  std::vector<Trajectory> trajectories;
};

/// Euler's equations for a bus carrying momentum wheels. Caches the inverse
/// inertia tensor.
class RigidBody {
 public:
  /// Throws DomainError when the tensor is singular.
  explicit RigidBody(const inertia::InertialParams& params);

  /// d(omega)/dt given stored wheel momentum `wheel_momentum` (body frame),
  /// external torque and the summed reaction torque of the wheels on the bus
  /// (the negated rate of change of wheel momentum).
  Vec3 omega_dot(const Vec3& omega, const Vec3& wheel_momentum,
                 const Vec3& external_torque, const Vec3& wheel_torque_sum) const {
    return inverse_ * (external_torque + wheel_torque_sum -
                       omega.cross(inertia_ * omega + wheel_momentum));
  }

  const Mat3& inertia() const { return inertia_; }

 private:
  Mat3 inertia_;
  Mat3 inverse_;
};

Vec3 euler_rhs(const inertia::InertialParams& params, const SpacecraftState& state,
               const Vec3& external_torque,
               std::span<const actuators::ReactionWheelModule> wheels,
               const Vec3& wheel_torque_sum);

using TorqueFn = std::function<Vec3(double)>;

/// One classical RK4 step of the bus rates over [t, t + dt]. Wheels (if any)
/// are first advanced with their own RK4 under `wheel_voltages`; their
/// momentum is interpolated linearly across the step and their reaction
/// torque is held at the discrete momentum difference. Throws NumericalError
/// on non-finite results.
SpacecraftState rk4_step(const RigidBody& body, const SpacecraftState& state,
                         const TorqueFn& torque, double dt,
                         std::span<const actuators::ReactionWheelModule> wheels = {},
                         std::span<const double> wheel_voltages = {});

/// Total body-frame angular momentum I w + sum of wheel momenta.
Vec3 total_momentum(const RigidBody& body, const SpacecraftState& state,
                    std::span<const actuators::ReactionWheelModule> wheels);

struct SlotOutcome {
  actuators::SlotCosts costs;
  bool terminated = false;
  int steps = 0;
};

/// Slot-by-slot simulation of one plant with its own noise stream. Valve
/// filter state and wheel states persist across slots.
class Simulator {
 public:
  Simulator(Plant plant, SimConfig sim, std::uint64_t seed);

  /// Back to rest with a fresh noise stream and an empty trajectory.
  void reset(std::uint64_t seed);

  /// Holds `action` for one slot and appends measured samples to the
  /// trajectory. After the rate limit trips the simulator stops and further
  /// calls are no-ops returning terminated = true.
  SlotOutcome run_slot(const actuators::ActuationVector& action);

  const SpacecraftState& state() const { return state_; }
  const Trajectory& trajectory() const { return trajectory_; }
  Trajectory& trajectory() { return trajectory_; }
  bool terminated() const { return trajectory_.terminated; }
  const Plant& plant() const { return plant_; }
  const SimConfig& config() const { return sim_; }

  void set_state(const SpacecraftState& state) { state_ = state; }

 private:
  Plant plant_;
  SimConfig sim_;
  RigidBody body_;
  std::mt19937_64 rng_;
  SpacecraftState state_;
  std::vector<double> valve_state_;
  std::int64_t step_index_ = 0;
  int steps_per_slot_ = 0;
  int pwm_samples_ = 0;  // samples per PWM period when commensurate, else 0
  Trajectory trajectory_;
};

/// Applies `sequence` slot by slot from `initial`. Stops early (flagged, not
/// thrown) when the rate limit trips.
Trajectory simulate_sequence(const Plant& plant, const SpacecraftState& initial,
                             const std::vector<actuators::ActuationVector>& sequence,
                             const SimConfig& sim, std::uint64_t seed);

struct LabelledConfig {
  std::string label;
  inertia::InertialParams params;
};

/// Seed of replicate `replicate` of configuration `config`.
std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t config,
                             std::size_t replicate);

/// `replicates` noisy simulations per configuration, ordered by configuration
/// then replicate. Results are independent of `jobs`.
TrajectorySet generate_dataset(const std::vector<LabelledConfig>& configs,
                               const Plant& actuators_template,
                               const std::vector<actuators::ActuationVector>& sequence,
                               int replicates, const SimConfig& sim,
                               std::uint64_t master_seed, int jobs = 1);

/// CSV with header `t,wx,wy,wz,label,replicate,terminated`.
void write_csv(std::ostream& out, const TrajectorySet& set);
TrajectorySet read_csv(std::istream& in);

}  // namespace inertid::dynamics
