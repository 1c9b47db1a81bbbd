#include "inertid/actuators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "inertid/errors.hpp"

namespace inertid::actuators {

ThrusterBank default_thruster_bank(double max_torque) {
  ThrusterBank bank;
  bank.torque_matrix.resize(3, 6);
  bank.torque_matrix << 1, 0, 0, -1, 0, 0,
                        0, 1, 0, 0, -1, 0,
                        0, 0, 1, 0, 0, -1;
  bank.torque_matrix *= max_torque;
  return bank;
}

void validate(const ThrusterBank& bank) {
  if (bank.count() < 6)
    throw ValidationError("thruster bank needs at least 6 thrusters, got " +
                          std::to_string(bank.count()));
  if (!bank.torque_matrix.allFinite())
    throw ValidationError("thruster matrix has non-finite entries");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(bank.torque_matrix);
  if (lu.rank() < 3) throw ValidationError("thruster matrix must have rank 3");
  if (!(bank.pwm_period > 0.0)) throw ValidationError("pwm_period must be positive");
  if (!(bank.filter_time_constant >= 0.0))
    throw ValidationError("filter_time_constant must be non-negative");
}

std::vector<ReactionWheelModule> default_wheels() {
  std::vector<ReactionWheelModule> wheels(3);
  wheels[0].axis = Vec3::UnitX();
  wheels[1].axis = Vec3::UnitY();
  wheels[2].axis = Vec3::UnitZ();
  return wheels;
}

bool ReactionWheelModule::operator==(const ReactionWheelModule& o) const {
  return rotor_inertia == o.rotor_inertia && friction == o.friction &&
         motor_constant == o.motor_constant && resistance == o.resistance &&
         inductance == o.inductance && supply_voltage == o.supply_voltage && axis == o.axis;
}

void validate(const ReactionWheelModule& w) {
  const double params[] = {w.rotor_inertia, w.friction,   w.motor_constant,
                           w.resistance,    w.inductance, w.supply_voltage};
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p))
      throw ValidationError("reaction wheel parameters must be positive");
  }
  if (std::abs(w.axis.norm() - 1.0) > 1e-12)
    throw ValidationError("reaction wheel axis must be a unit vector");
}

ActuationVector ActuationVector::null(std::size_t thrusters, std::size_t wheels) {
  return {std::vector<double>(thrusters, 0.0), std::vector<double>(wheels, 0.0)};
}

bool ActuationVector::is_null() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(thruster_duty.begin(), thruster_duty.end(), zero) &&
         std::all_of(wheel_voltage_fraction.begin(), wheel_voltage_fraction.end(), zero);
}

void validate(const ActuationVector& a, std::size_t thrusters, std::size_t wheels) {
  if (a.thruster_duty.size() != thrusters || a.wheel_voltage_fraction.size() != wheels)
    throw ValidationError("actuation vector size does not match the actuator set");
  for (double d : a.thruster_duty)
    if (!(d >= 0.0 && d <= 1.0)) throw ValidationError("thruster duty outside [0, 1]");
  for (double v : a.wheel_voltage_fraction)
    if (!(v >= -1.0 && v <= 1.0))
      throw ValidationError("wheel voltage fraction outside [-1, 1]");
}

ActuationVector clamp_action(std::span<const double> raw, std::size_t thrusters,
                             std::size_t wheels) {
  if (raw.size() != thrusters + wheels)
    throw ValidationError("raw action has " + std::to_string(raw.size()) +
                          " components, expected " + std::to_string(thrusters + wheels));
  ActuationVector a;
  a.thruster_duty.reserve(thrusters);
  a.wheel_voltage_fraction.reserve(wheels);
  for (std::size_t i = 0; i < thrusters; ++i)
    a.thruster_duty.push_back(std::isfinite(raw[i]) ? std::clamp(raw[i], 0.0, 1.0) : 0.0);
  for (std::size_t i = thrusters; i < raw.size(); ++i)
    a.wheel_voltage_fraction.push_back(
        std::isfinite(raw[i]) ? std::clamp(raw[i], -1.0, 1.0) : 0.0);
  return a;
}

int pwm_signal(double duty, double time, double period) {
  if (!(duty >= 0.0 && duty <= 1.0)) throw ValidationError("duty outside [0, 1]");
  if (!(period > 0.0)) throw ValidationError("pwm period must be positive");
  double phase = std::fmod(time, period) / period;
  if (phase < 0.0) phase += 1.0;
  return phase < duty ? 1 : 0;
}

std::vector<double> filtered_valve_response(std::span<const double> raw,
                                            double time_constant, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(time_constant >= 0.0))
    throw ValidationError("filter time constant must be non-negative");
  const double gain = valve_filter_gain(time_constant, dt);
  std::vector<double> out;
  out.reserve(raw.size());
  double y = 0.0;
  for (double r : raw) {
    y += gain * (r - y);
    out.push_back(std::clamp(y, 0.0, 1.0));
  }
  return out;
}

Vec3 thruster_torque(const ThrusterBank& bank, std::span<const double> duties) {
  if (duties.size() != bank.count())
    throw ValidationError("duty vector length does not match thruster count");
  Vec3 out = Vec3::Zero();
  for (std::size_t j = 0; j < duties.size(); ++j)
    out += bank.torque_matrix.col(static_cast<Eigen::Index>(j)) * duties[j];
  return out;
}

namespace {

struct WheelDerivative {
  double speed_rate;
  double current_rate;
};

inline WheelDerivative wheel_rhs(const ReactionWheelModule& w, double speed,
                                 double current, double voltage) {
  return {(-w.friction * speed + w.motor_constant * current) / w.rotor_inertia,
          (-w.motor_constant * speed - w.resistance * current + voltage) / w.inductance};
}

}  // namespace

WheelState wheel_step(const ReactionWheelModule& w, const WheelState& s,
                      double voltage, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (std::abs(voltage) > w.supply_voltage * (1.0 + 1e-12))
    throw ValidationError("applied voltage exceeds the supply voltage");
  const auto k1 = wheel_rhs(w, s.speed, s.current, voltage);
  const auto k2 = wheel_rhs(w, s.speed + 0.5 * dt * k1.speed_rate,
                            s.current + 0.5 * dt * k1.current_rate, voltage);
  const auto k3 = wheel_rhs(w, s.speed + 0.5 * dt * k2.speed_rate,
                            s.current + 0.5 * dt * k2.current_rate, voltage);
  const auto k4 = wheel_rhs(w, s.speed + dt * k3.speed_rate,
                            s.current + dt * k3.current_rate, voltage);
  return {s.speed + dt / 6.0 *
                        (k1.speed_rate + 2.0 * k2.speed_rate + 2.0 * k3.speed_rate +
                         k4.speed_rate),
          s.current + dt / 6.0 *
                          (k1.current_rate + 2.0 * k2.current_rate +
                           2.0 * k3.current_rate + k4.current_rate)};
}

Vec3 wheel_reaction_torque(const ReactionWheelModule& w, const WheelState& before,
                           const WheelState& after, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  return -w.axis * w.rotor_inertia * (after.speed - before.speed) / dt;
}

SlotCosts slot_costs(const ActuationVector& action,
                     const std::vector<std::vector<WheelSample>>& wheel_traces,
                     double slot_duration, double dt) {
  if (!(slot_duration > 0.0)) throw ValidationError("slot duration must be positive");
  SlotCosts c;
  for (double d : action.thruster_duty) c.gas += d * slot_duration;
  for (const auto& trace : wheel_traces)
    for (const auto& s : trace) c.wheel += std::abs(s.voltage * s.current) * dt;
  return c;
}

}  // namespace inertid::actuators
