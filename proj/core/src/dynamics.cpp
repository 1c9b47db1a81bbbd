#include "inertid/dynamics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "inertid/errors.hpp"
#include "inertid/parallel.hpp"
#include "inertid/seed.hpp"

namespace inertid::dynamics {

using actuators::ActuationVector;
using actuators::ReactionWheelModule;
using actuators::WheelState;

SpacecraftState rest_state(std::size_t wheels) {
  SpacecraftState s;
  s.wheels.assign(wheels, WheelState{});
  return s;
}

void validate(const SimConfig& sim) {
  if (!(sim.dt > 0.0)) throw ValidationError("dt must be positive");
  if (!(sim.slot_duration > 0.0)) throw ValidationError("slot duration must be positive");
  if (!(sim.omega_limit > 0.0)) throw ValidationError("omega_limit must be positive");
  if (!(sim.sensor_noise_std >= 0.0) || !(sim.actuation_noise_std >= 0.0) ||
      !(sim.disturbance_torque_std >= 0.0))
    throw ValidationError("noise levels must be non-negative");
  const double ratio = sim.slot_duration / sim.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ValidationError("slot duration must be an integer multiple of dt");
}

int steps_per_slot(const SimConfig& sim) {
  return static_cast<int>(std::lround(sim.slot_duration / sim.dt));
}

RigidBody::RigidBody(const inertia::InertialParams& params) : inertia_(params.inertia) {
  Eigen::FullPivLU<Mat3> lu(inertia_);
  if (!params.invertible || !lu.isInvertible())
    throw DomainError("inertia tensor is singular");
  inverse_ = lu.inverse();
}

namespace {

Vec3 stored_momentum(std::span<const ReactionWheelModule> wheels,
                     std::span<const WheelState> states) {
  Vec3 h = Vec3::Zero();
  for (std::size_t w = 0; w < wheels.size(); ++w)
    h += actuators::wheel_momentum(wheels[w], states[w]);
  return h;
}

// RK4 on the bus rates with wheel momentum varying linearly from h0 to h1.
template <typename Torque>
Vec3 advance_rates(const RigidBody& body, const Vec3& omega, double t, double dt,
                   Torque&& torque, const Vec3& h0, const Vec3& h1) {
  const Vec3 dh = h1 - h0;
  const Vec3 wheel_torque = -dh / dt;
  auto f = [&](double tau, const Vec3& w) {
    return body.omega_dot(w, h0 + tau * dh, torque(t + tau * dt), wheel_torque);
  };
  const Vec3 k1 = f(0.0, omega);
  const Vec3 k2 = f(0.5, omega + 0.5 * dt * k1);
  const Vec3 k3 = f(0.5, omega + 0.5 * dt * k2);
  const Vec3 k4 = f(1.0, omega + dt * k3);
  return omega + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Vec3 euler_rhs(const inertia::InertialParams& params, const SpacecraftState& state,
               const Vec3& external_torque, std::span<const ReactionWheelModule> wheels,
               const Vec3& wheel_torque_sum) {
  const RigidBody body(params);
  const Vec3 h = stored_momentum(wheels, {state.wheels.data(), wheels.size()});
  return body.omega_dot(state.omega, h, external_torque, wheel_torque_sum);
}

SpacecraftState rk4_step(const RigidBody& body, const SpacecraftState& state,
                         const TorqueFn& torque, double dt,
                         std::span<const ReactionWheelModule> wheels,
                         std::span<const double> wheel_voltages) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (state.wheels.size() < wheels.size())
    throw ValidationError("state holds fewer wheel states than wheel modules");
  if (!wheel_voltages.empty() && wheel_voltages.size() != wheels.size())
    throw ValidationError("one voltage per wheel is required");

  SpacecraftState next = state;
  for (std::size_t w = 0; w < wheels.size(); ++w) {
    const double v = wheel_voltages.empty() ? 0.0 : wheel_voltages[w];
    next.wheels[w] = actuators::wheel_step(wheels[w], state.wheels[w], v, dt);
  }
  const Vec3 h0 = stored_momentum(wheels, state.wheels);
  const Vec3 h1 = stored_momentum(wheels, next.wheels);
  auto ext = [&](double t) { return torque ? torque(t) : Vec3::Zero().eval(); };
  next.omega = advance_rates(body, state.omega, state.time, dt, ext, h0, h1);
  next.time = state.time + dt;
  if (!next.omega.allFinite()) throw NumericalError("non-finite body rates");
  return next;
}

Vec3 total_momentum(const RigidBody& body, const SpacecraftState& state,
                    std::span<const ReactionWheelModule> wheels) {
  return body.inertia() * state.omega +
         stored_momentum(wheels, {state.wheels.data(), wheels.size()});
}

Simulator::Simulator(Plant plant, SimConfig sim, std::uint64_t seed)
    : plant_(std::move(plant)), sim_(sim), body_(plant_.inertia) {
  validate(sim_);
  actuators::validate(plant_.thrusters);
  for (const auto& w : plant_.wheels) actuators::validate(w);
  steps_per_slot_ = steps_per_slot(sim_);
  const double per_period = plant_.thrusters.pwm_period / sim_.dt;
  pwm_samples_ = std::abs(per_period - std::round(per_period)) < 1e-9
                     ? static_cast<int>(std::lround(per_period))
                     : 0;
  reset(seed);
}

void Simulator::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = rest_state(plant_.wheels.size());
  valve_state_.assign(plant_.thrusters.count(), 0.0);
  step_index_ = 0;
  trajectory_.samples.clear();
  trajectory_.terminated = false;
}

SlotOutcome Simulator::run_slot(const ActuationVector& action) {
  const std::size_t n_thr = plant_.thrusters.count();
  const std::size_t n_wheels = plant_.wheels.size();
  actuators::validate(action, n_thr, n_wheels);

  SlotOutcome out;
  if (trajectory_.terminated) {
    out.terminated = true;
    return out;
  }

  std::normal_distribution<double> normal(0.0, 1.0);

  // Actuation noise: one multiplicative draw per actuator per slot.
  std::vector<double> duty(action.thruster_duty);
  std::vector<double> volts(n_wheels);
  for (auto& d : duty) {
    const double e = normal(rng_);
    if (sim_.actuation_noise_std > 0.0)
      d = std::clamp(d * (1.0 + sim_.actuation_noise_std * e), 0.0, 1.0);
  }
  for (std::size_t w = 0; w < n_wheels; ++w) {
    const double e = normal(rng_);
    double f = action.wheel_voltage_fraction[w];
    if (sim_.actuation_noise_std > 0.0)
      f = std::clamp(f * (1.0 + sim_.actuation_noise_std * e), -1.0, 1.0);
    volts[w] = f * plant_.wheels[w].supply_voltage;
  }

  const double gain = actuators::valve_filter_gain(plant_.thrusters.filter_time_constant, sim_.dt);
  const double period = plant_.thrusters.pwm_period;
  std::vector<std::vector<actuators::WheelSample>> wheel_traces(n_wheels);
  for (auto& t : wheel_traces) t.reserve(static_cast<std::size_t>(steps_per_slot_));

  std::vector<WheelState> next_wheels(n_wheels);
  for (int k = 0; k < steps_per_slot_; ++k) {
    const double phase_time =
        pwm_samples_ > 0 ? static_cast<double>(step_index_ % pwm_samples_) * sim_.dt
                         : static_cast<double>(step_index_) * sim_.dt;
    for (std::size_t j = 0; j < n_thr; ++j) {
      const int raw = actuators::pwm_signal(duty[j], phase_time, period);
      valve_state_[j] += gain * (raw - valve_state_[j]);
    }
    Vec3 torque = actuators::thruster_torque(plant_.thrusters, valve_state_);
    if (sim_.disturbance_torque_std > 0.0) {
      for (int a = 0; a < 3; ++a) torque(a) += sim_.disturbance_torque_std * normal(rng_);
    }

    for (std::size_t w = 0; w < n_wheels; ++w) {
      next_wheels[w] = actuators::wheel_step(plant_.wheels[w], state_.wheels[w], volts[w], sim_.dt);
      wheel_traces[w].push_back({volts[w], next_wheels[w].current});
    }
    const Vec3 h0 = stored_momentum(plant_.wheels, state_.wheels);
    const Vec3 h1 = stored_momentum(plant_.wheels, next_wheels);
    state_.omega = advance_rates(body_, state_.omega, state_.time, sim_.dt,
                                 [&](double) { return torque; }, h0, h1);
    state_.wheels = next_wheels;
    ++step_index_;
    state_.time = static_cast<double>(step_index_) * sim_.dt;
    if (!state_.omega.allFinite()) throw NumericalError("non-finite body rates");

    Sample s;
    s.time = state_.time;
    s.omega = state_.omega;
    if (sim_.sensor_noise_std > 0.0) {
      for (int a = 0; a < 3; ++a) s.omega(a) += sim_.sensor_noise_std * normal(rng_);
    }
    trajectory_.samples.push_back(s);
    ++out.steps;

    if (state_.omega.norm() > sim_.omega_limit) {
      trajectory_.terminated = true;
      out.terminated = true;
      break;
    }
  }
  out.costs = actuators::slot_costs(action, wheel_traces, sim_.slot_duration, sim_.dt);
  return out;
}

Trajectory simulate_sequence(const Plant& plant, const SpacecraftState& initial,
                             const std::vector<ActuationVector>& sequence,
                             const SimConfig& sim, std::uint64_t seed) {
  if (sequence.empty()) throw ValidationError("actuation sequence is empty");
  Simulator simulator(plant, sim, seed);
  SpacecraftState start = initial;
  if (start.wheels.size() != plant.wheels.size())
    throw ValidationError("initial state wheel count does not match the plant");
  simulator.set_state(start);
  for (const auto& action : sequence) {
    if (simulator.run_slot(action).terminated) break;
  }
  return simulator.trajectory();
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::size_t config,
                             std::size_t replicate) {
  return derive_seed(master_seed, {0x5eedULL, config, replicate});
}

TrajectorySet generate_dataset(const std::vector<LabelledConfig>& configs,
                               const Plant& actuators_template,
                               const std::vector<ActuationVector>& sequence,
                               int replicates, const SimConfig& sim,
                               std::uint64_t master_seed, int jobs) {
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  if (configs.empty()) throw ValidationError("no configurations to simulate");
  const std::size_t reps = static_cast<std::size_t>(replicates);
  TrajectorySet set;
  set.trajectories.resize(configs.size() * reps);
  parallel_for(set.trajectories.size(), jobs, [&](std::size_t idx) {
    const std::size_t c = idx / reps;
    const std::size_t r = idx % reps;
    Plant plant = actuators_template;
    plant.inertia = configs[c].params;
    Trajectory t = simulate_sequence(plant, rest_state(plant.wheels.size()), sequence,
                                     sim, replicate_seed(master_seed, c, r));
    t.config_label = configs[c].label;
    t.replicate_index = static_cast<int>(r);
    set.trajectories[idx] = std::move(t);
  });
  return set;
}

void write_csv(std::ostream& out, const TrajectorySet& set) {
  out << "t,wx,wy,wz,label,replicate,terminated\n";
  char buf[160];
  for (const auto& traj : set.trajectories) {
    for (const auto& s : traj.samples) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", s.time, s.omega.x(),
                    s.omega.y(), s.omega.z());
      out << buf << traj.config_label << ',' << traj.replicate_index << ','
          << (traj.terminated ? 1 : 0) << '\n';
    }
  }
}

TrajectorySet read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,wx,wy,wz,label,replicate,terminated")
    throw ValidationError("unexpected trajectory CSV header: " + line);

  TrajectorySet set;
  // Rows of one trajectory may be interleaved with others; group by key in
  // order of first appearance.
  std::vector<std::pair<std::string, int>> keys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7)
      throw ValidationError("line " + std::to_string(line_no) + ": expected 7 fields");
    Sample s;
    int replicate = 0;
    bool terminated = false;
    try {
      s.time = std::stod(f[0]);
      s.omega = Vec3(std::stod(f[1]), std::stod(f[2]), std::stod(f[3]));
      replicate = std::stoi(f[5]);
      terminated = std::stoi(f[6]) != 0;
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed number");
    }
    const std::pair<std::string, int> key{f[4], replicate};
    auto it = std::find(keys.begin(), keys.end(), key);
    std::size_t idx = static_cast<std::size_t>(it - keys.begin());
    if (it == keys.end()) {
      keys.push_back(key);
      Trajectory t;
      t.config_label = f[4];
      t.replicate_index = replicate;
      set.trajectories.push_back(std::move(t));
    }
    auto& traj = set.trajectories[idx];
    traj.terminated = traj.terminated || terminated;
    traj.samples.push_back(s);
  }
  for (auto& t : set.trajectories) {
    std::stable_sort(t.samples.begin(), t.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.time < b.time; });
  }
  return set;
}

}  // namespace inertid::dynamics
