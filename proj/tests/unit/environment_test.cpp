#include <gtest/gtest.h>

#include "inertid/errors.hpp"
#include "inertid/rl/environment.hpp"

namespace inertid::rl {
namespace {

inertia::InertialParams diag_params(double a, double b, double c) {
  inertia::InertialParams p;
  p.total_mass = 1.0;
  p.inertia = Vec3(a, b, c).asDiagonal();
  p.invertible = true;
  return p;
}

EnvSpec small_spec() {
  EnvSpec s;
  s.n_slots = 3;
  s.configs = {{"light", diag_params(400, 500, 600)},
               {"mid", diag_params(600, 500, 600)},
               {"heavy", diag_params(900, 500, 600)}};
  s.replicates_per_config = 2;
  s.sim.slot_duration = 1.0;
  s.classifier.downsample = 10;
  s.classifier.n_init = 1;
  s.weights = RewardWeights::speed();
  return s;
}

std::vector<double> excite() {
  std::vector<double> a(9, 0.0);
  a[0] = 1.0;
  return a;
}

TEST(Environment, RewardDecomposesExactly) {
  IdentificationEnv env(small_spec());
  env.reset(1);
  const auto a = excite();
  for (int t = 0; t < 3; ++t) {
    const StepResult r = env.step(a);
    const RewardWeights w = env.spec().weights;
    EXPECT_EQ(r.reward, w.reward(r.info.c_t, r.info.c_gt, r.info.c_rw, r.info.f1));
    EXPECT_EQ(r.info.c_t, 1.0);
    if (r.done()) break;
  }
}

TEST(Environment, SeparableExcitationTruncates) {
  IdentificationEnv env(small_spec());
  env.reset(2);
  const StepResult r = env.step(excite());
  EXPECT_EQ(r.info.f1, 1.0);
  EXPECT_TRUE(r.truncated);
  EXPECT_THROW(env.step(excite()), StateError);
  EXPECT_EQ(env.reset(3), 0);
  EXPECT_NO_THROW(env.step(excite()));
}

TEST(Environment, ObservationsIgnoreNoise) {
  EnvSpec spec = small_spec();
  IdentificationEnv a(spec), b(spec);
  a.reset(10);
  b.reset(20);
  std::vector<double> weak(9, 0.0);
  weak[7] = 0.01;
  for (int t = 0; t < 3; ++t) {
    const StepResult ra = a.step(weak), rb = b.step(weak);
    EXPECT_EQ(ra.observation, rb.observation);
    EXPECT_EQ(ra.observation, std::min(t + 1, 2));
    if (ra.done() || rb.done()) break;
  }
}

TEST(Environment, NullActionWithoutNoiseStaysNearChance) {
  EnvSpec spec = small_spec();
  spec.sim.sensor_noise_std = 0.0;
  spec.sim.actuation_noise_std = 0.0;
  IdentificationEnv env(spec);
  env.reset(1);
  const StepResult r = env.step(std::vector<double>(9, 0.0));
  EXPECT_LT(r.info.f1, 1.0);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.info.c_gt, 0.0);
  EXPECT_EQ(r.info.c_rw, 0.0);
}

TEST(Environment, StepLimitTerminates) {
  EnvSpec spec = small_spec();
  spec.sim.sensor_noise_std = 0.0;
  spec.sim.actuation_noise_std = 0.0;
  IdentificationEnv env(spec);
  env.reset(1);
  StepResult r;
  for (int t = 0; t < 3; ++t) r = env.step(std::vector<double>(9, 0.0));
  EXPECT_TRUE(r.terminated);
}

TEST(Environment, RewardWeightPresets) {
  EXPECT_DOUBLE_EQ((RewardWeights{1, 0, 0, 10}).reward(1.0, 5.0, 5.0, 0.5), 4.0);
  EXPECT_THROW(validate(RewardWeights{1, 0, 0, 0}), ValidationError);
  EXPECT_GT(RewardWeights::fuel().a1, 10 * RewardWeights::fuel().a2);
}

}  // namespace
}  // namespace inertid::rl
