#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "inertid/actuators.hpp"
#include "inertid/errors.hpp"

namespace inertid::actuators {
namespace {

// Exact solution of the linear motor model under constant voltage:
// x(dt) = e^{A dt} x0 + A^{-1} (e^{A dt} - I) B V.
WheelState exact_wheel(const ReactionWheelModule& w, const WheelState& s, double v, double dt) {
  Eigen::Matrix2d A;
  A << -w.friction / w.rotor_inertia, w.motor_constant / w.rotor_inertia,
      -w.motor_constant / w.inductance, -w.resistance / w.inductance;
  const Eigen::Vector2d B(0.0, 1.0 / w.inductance);
  const Eigen::Matrix2d E = (A * dt).exp();
  const Eigen::Vector2d x0(s.speed, s.current);
  const Eigen::Vector2d x = E * x0 + A.inverse() * (E - Eigen::Matrix2d::Identity()) * B * v;
  return {x(0), x(1)};
}

TEST(Actuators, WheelStepMatchesMatrixExponential) {
  const ReactionWheelModule w;
  WheelState s{3.0, -0.4};
  for (double v : {-24.0, -5.0, 0.0, 12.0, 24.0}) {
    // Step short enough that RK4 truncation (~(50 dt)^5 / 120) is negligible.
    const WheelState rk = wheel_step(w, s, v, 1e-4);
    const WheelState ex = exact_wheel(w, s, v, 1e-4);
    EXPECT_NEAR(rk.speed, ex.speed, 1e-11);
    EXPECT_NEAR(rk.current, ex.current, 1e-11);
  }
}

TEST(Actuators, WheelTrajectoryTracksExactSolution) {
  const ReactionWheelModule w;
  WheelState rk{};
  WheelState ex{};
  for (int k = 0; k < 500; ++k) {
    rk = wheel_step(w, rk, 24.0, 0.01);
    ex = exact_wheel(w, ex, 24.0, 0.01);
  }
  EXPECT_NEAR(rk.speed, ex.speed, 1e-4 * std::abs(ex.speed));
  EXPECT_NEAR(rk.current, ex.current, 1e-4 * std::abs(ex.current) + 1e-8);
}

TEST(Actuators, WheelSteadyStateSpeed) {
  const ReactionWheelModule w;
  WheelState s{};
  for (int k = 0; k < 200000; ++k) s = wheel_step(w, s, 24.0, 0.01);
  // w_ss = K V / (b R + K^2)
  const double expected = w.motor_constant * 24.0 /
                          (w.friction * w.resistance + w.motor_constant * w.motor_constant);
  EXPECT_NEAR(s.speed, expected, 1e-6 * expected);
}

TEST(Actuators, OvervoltageIsRejected) {
  const ReactionWheelModule w;
  EXPECT_THROW(wheel_step(w, {}, 25.0, 0.01), ValidationError);
}

TEST(Actuators, ReactionTorqueOpposesRotorAcceleration) {
  ReactionWheelModule w;
  w.axis = Vec3::UnitY();
  const Vec3 t = wheel_reaction_torque(w, {0.0, 0.0}, {2.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(t.y(), -w.rotor_inertia * 4.0);
  EXPECT_DOUBLE_EQ(t.x(), 0.0);
}

TEST(Actuators, PwmDutyFractionOverOnePeriod) {
  const double period = 0.1;
  const int n = 1000;
  for (double duty : {0.0, 0.25, 0.5, 1.0}) {
    int on = 0;
    for (int k = 0; k < n; ++k) on += pwm_signal(duty, k * period / n, period);
    EXPECT_NEAR(static_cast<double>(on) / n, duty, 1.0 / n);
  }
}

TEST(Actuators, ValveFilterStepResponse) {
  const double tau = 0.02, dt = 0.01;
  const std::vector<double> raw(40, 1.0);
  const auto y = filtered_valve_response(raw, tau, dt);
  const double g = dt / (tau + dt);
  for (std::size_t k = 0; k < y.size(); ++k)
    EXPECT_NEAR(y[k], 1.0 - std::pow(1.0 - g, static_cast<double>(k + 1)), 1e-14);
  const auto instant = filtered_valve_response(raw, 0.0, dt);
  EXPECT_DOUBLE_EQ(instant.front(), 1.0);
}

TEST(Actuators, DefaultBankProducesSignedAxisTorques) {
  const ThrusterBank bank = default_thruster_bank();
  ASSERT_EQ(bank.count(), 6u);
  std::vector<double> duty(6, 0.0);
  duty[0] = 1.0;
  const Vec3 t = thruster_torque(bank, duty);
  EXPECT_NEAR(t.norm(), 50.0, 1e-12);
  std::vector<double> all(6, 1.0);
  EXPECT_LT(thruster_torque(bank, all).norm(), 1e-12);
  EXPECT_NO_THROW(validate(bank));
  ThrusterBank small = bank;
  small.torque_matrix = bank.torque_matrix.leftCols(5);
  EXPECT_THROW(validate(small), ValidationError);
}

TEST(Actuators, ClampActionBoundsAndNonFinite) {
  const std::vector<double> raw = {-0.5, 0.3, 1.7, std::numeric_limits<double>::quiet_NaN(), 0.0, 2.0,
                                   -3.0, 0.5, std::numeric_limits<double>::infinity()};
  const ActuationVector a = clamp_action(raw, 6, 3);
  EXPECT_EQ(a.thruster_duty, (std::vector<double>{0.0, 0.3, 1.0, 0.0, 0.0, 1.0}));
  EXPECT_EQ(a.wheel_voltage_fraction, (std::vector<double>{-1.0, 0.5, 0.0}));
  EXPECT_NO_THROW(validate(a, 6, 3));
  EXPECT_THROW(validate(a, 5, 3), ValidationError);
  EXPECT_TRUE(ActuationVector::null(6, 3).is_null());
}

TEST(Actuators, SlotCostsSumDutyAndElectricalEnergy) {
  ActuationVector a = ActuationVector::null(6, 1);
  a.thruster_duty[1] = 0.5;
  a.thruster_duty[4] = 0.25;
  const std::vector<std::vector<WheelSample>> traces = {{{2.0, 1.0}, {-2.0, 0.5}, {2.0, -1.5}}};
  const SlotCosts c = slot_costs(a, traces, 5.0, 0.1);
  EXPECT_DOUBLE_EQ(c.gas, 3.75);
  EXPECT_NEAR(c.wheel, (2.0 + 1.0 + 3.0) * 0.1, 1e-15);
}

}  // namespace
}  // namespace inertid::actuators
