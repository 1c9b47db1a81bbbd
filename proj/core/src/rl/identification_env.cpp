#include <algorithm>
#include <cmath>

#include "inertid/errors.hpp"
#include "inertid/parallel.hpp"
#include "inertid/rl/environment.hpp"
#include "inertid/seed.hpp"

namespace inertid::rl {

void validate(const RewardWeights& w) {
  if (!(w.a0 >= 0.0) || !(w.a1 >= 0.0) || !(w.a2 >= 0.0) || !(w.a3 >= 0.0))
    throw ValidationError("reward weights must be non-negative");
  if (!(w.a3 > 0.0))
    throw ValidationError("reward weight a3 must be positive (no classification signal otherwise)");
}

void validate(const EnvSpec& spec) {
  if (spec.n_slots < 1) throw ValidationError("n_slots must be at least 1");
  if (spec.action_dim() < 1) throw ValidationError("action space is empty");
  if (spec.configs.size() < 2) throw ValidationError("at least two configurations are needed");
  if (spec.replicates_per_config < 1) throw ValidationError("replicates_per_config must be >= 1");
  validate(spec.weights);
  dynamics::validate(spec.sim);
}

std::uint64_t episode_sim_seed(std::uint64_t episode_seed, std::size_t config,
                               std::size_t replicate) {
  return derive_seed(episode_seed, {0xe9150deULL, config, replicate});
}

IdentificationEnv::IdentificationEnv(EnvSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  spec_.classifier.k = static_cast<int>(spec_.configs.size());
  for (std::size_t c = 0; c < spec_.configs.size(); ++c) {
    for (int r = 0; r < spec_.replicates_per_config; ++r) {
      dynamics::Plant plant = spec_.plant;
      plant.inertia = spec_.configs[c].params;
      sims_.emplace_back(std::move(plant), spec_.sim, 0);
      sims_.back().trajectory().config_label = spec_.configs[c].label;
      sims_.back().trajectory().replicate_index = r;
      truth_.push_back(spec_.configs[c].label);
    }
  }
}

void IdentificationEnv::set_classifier(const tsc::KMeansOptions& options) {
  spec_.classifier = options;
  spec_.classifier.k = static_cast<int>(spec_.configs.size());
}

int IdentificationEnv::reset(std::uint64_t episode_seed) {
  episode_seed_ = episode_seed;
  const std::size_t reps = static_cast<std::size_t>(spec_.replicates_per_config);
  for (std::size_t i = 0; i < sims_.size(); ++i)
    sims_[i].reset(episode_sim_seed(episode_seed, i / reps, i % reps));
  step_ = 0;
  active_ = true;
  model_ = tsc::ClusterModel{};
  return 0;
}

std::vector<double> IdentificationEnv::clamp(std::span<const double> raw) const {
  const auto a = actuators::clamp_action(raw, spec_.plant.thrusters.count(),
                                         spec_.plant.wheels.size());
  std::vector<double> out(a.thruster_duty);
  out.insert(out.end(), a.wheel_voltage_fraction.begin(), a.wheel_voltage_fraction.end());
  return out;
}

StepResult IdentificationEnv::step(std::span<const double> raw) {
  if (!active_) throw StateError("step called on a finished episode; call reset first");
  const std::size_t n_thr = spec_.plant.thrusters.count();
  const std::size_t n_wheels = spec_.plant.wheels.size();
  const actuators::ActuationVector action = actuators::clamp_action(raw, n_thr, n_wheels);

  std::vector<dynamics::SlotOutcome> outcomes(sims_.size());
  parallel_for(sims_.size(), spec_.jobs,
               [&](std::size_t i) { outcomes[i] = sims_[i].run_slot(action); });

  StepResult res;
  bool rate_limited = false;
  for (const auto& o : outcomes) {
    res.info.c_gt += o.costs.gas;
    res.info.c_rw += o.costs.wheel;
    rate_limited = rate_limited || o.terminated;
  }
  const double count = static_cast<double>(sims_.size());
  res.info.c_gt /= count;
  res.info.c_rw /= count;
  res.info.c_t = 1.0;
  for (double d : action.thruster_duty) res.info.thruster_util += d;
  if (n_thr > 0) res.info.thruster_util /= static_cast<double>(n_thr);
  for (double v : action.wheel_voltage_fraction) res.info.wheel_util += std::abs(v);
  if (n_wheels > 0) res.info.wheel_util /= static_cast<double>(n_wheels);

  // Score the prefix responses; early-stopped runs are held at their last
  // sample so every series spans the same time.
  const std::size_t length =
      static_cast<std::size_t>(step_ + 1) * static_cast<std::size_t>(dynamics::steps_per_slot(spec_.sim));
  std::vector<tsc::SeriesMatrix> data;
  data.reserve(sims_.size());
  for (const auto& s : sims_) data.push_back(tsc::series_from_trajectory(s.trajectory(), length));
  model_ = tsc::kmeans_fit(data, spec_.classifier);
  tsc::map_labels(model_, truth_);
  res.info.f1 = model_.mapped_f1;

  res.reward = spec_.weights.reward(res.info.c_t, res.info.c_gt, res.info.c_rw, res.info.f1);
  ++step_;
  res.observation = std::min(step_, spec_.n_slots - 1);
  res.terminated = rate_limited || step_ >= spec_.n_slots;
  res.truncated = res.info.f1 >= 1.0;
  active_ = !res.done();
  return res;
}

}  // namespace inertid::rl
