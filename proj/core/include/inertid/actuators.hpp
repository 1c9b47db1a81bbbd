#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "inertid/types.hpp"

namespace inertid::actuators {

/// Cold-gas thruster bank. Column j of `torque_matrix` is the body torque
/// (N m) produced by thruster j firing at full duty.
struct ThrusterBank {
  Eigen::Matrix<double, 3, Eigen::Dynamic> torque_matrix;
  double pwm_period = 0.1;             // s
  double filter_time_constant = 0.02;  // s

  std::size_t count() const { return static_cast<std::size_t>(torque_matrix.cols()); }
};

/// Six thrusters, one per signed body axis, scaled to `max_torque` N m.
ThrusterBank default_thruster_bank(double max_torque = 50.0);

/// Requires at least six thrusters, a rank-3 torque matrix, a positive PWM
/// period and a non-negative filter constant.
void validate(const ThrusterBank& bank);

/// DC-motor reaction wheel (rotor inertia J, friction b, motor constant K,
/// winding resistance R and inductance L, H-bridge supply V_s).
struct ReactionWheelModule {
  double rotor_inertia = 0.5;   // kg m^2
  double friction = 1e-3;       // N m s
  double motor_constant = 0.5;  // N m / A
  double resistance = 10.0;     // ohm
  double inductance = 0.2;      // H
  double supply_voltage = 24.0; // V
  Vec3 axis = Vec3::UnitX();

  bool operator==(const ReactionWheelModule& o) const;
};

/// Three wheels along the body x, y and z axes with default motor parameters.
std::vector<ReactionWheelModule> default_wheels();

void validate(const ReactionWheelModule& wheel);

struct WheelState {
  double speed = 0.0;    // rad/s
  double current = 0.0;  // A
};

struct ActuationVector {
  std::vector<double> thruster_duty;           // each in [0, 1]
  std::vector<double> wheel_voltage_fraction;  // each in [-1, 1]

  static ActuationVector null(std::size_t thrusters, std::size_t wheels);
  bool is_null() const;
  bool operator==(const ActuationVector&) const = default;
};

/// Throws ValidationError when sizes differ from the bank or any component is
/// outside its bound.
void validate(const ActuationVector& action, std::size_t thrusters,
              std::size_t wheels);

/// Splits a flat raw action (thrusters first, then wheels) and clamps each
/// component into its bound.
ActuationVector clamp_action(std::span<const double> raw, std::size_t thrusters,
                             std::size_t wheels);

/// PWM carrier: 1 while the phase fraction mod(time, period)/period is below
/// `duty`, otherwise 0.
int pwm_signal(double duty, double time, double period);

/// Per-sample gain of the first-order valve filter.
inline double valve_filter_gain(double time_constant, double dt) {
  return dt / (time_constant + dt);
}

/// First-order low-pass response of a valve driven by `raw`, starting at 0.
/// Element k of the result is the filter state after consuming raw[k].
std::vector<double> filtered_valve_response(std::span<const double> raw,
                                            double time_constant, double dt);

Vec3 thruster_torque(const ThrusterBank& bank, std::span<const double> duties);

/// Advances the motor state by `dt` under a constant terminal voltage using
/// one classical RK4 step.
WheelState wheel_step(const ReactionWheelModule& wheel, const WheelState& state,
                      double voltage, double dt);

/// Angular momentum stored in the rotor, expressed in the body frame.
inline Vec3 wheel_momentum(const ReactionWheelModule& wheel, const WheelState& s) {
  return wheel.rotor_inertia * s.speed * wheel.axis;
}

/// Torque exerted on the bus by the change of rotor momentum over one step.
Vec3 wheel_reaction_torque(const ReactionWheelModule& wheel,
                           const WheelState& before, const WheelState& after,
                           double dt);

struct WheelSample {
  double voltage = 0.0;
  double current = 0.0;
};

struct SlotCosts {
  double gas = 0.0;    // thruster-seconds
  double wheel = 0.0;  // J
};

/// Resource cost of holding `action` for one slot. `wheel_traces[w]` holds the
/// sampled (V, i) of wheel w at spacing `dt`.
SlotCosts slot_costs(const ActuationVector& action,
                     const std::vector<std::vector<WheelSample>>& wheel_traces,
                     double slot_duration, double dt);

}  // namespace inertid::actuators
