#include "inertid/rl/train.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "inertid/errors.hpp"
#include "inertid/seed.hpp"

namespace inertid::rl {
namespace {

double window_mean(const std::vector<EpisodeRecord>& eps, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += eps[i].reward;
  return s / static_cast<double>(end - begin);
}

}  // namespace

double TrainingLog::leading_mean(std::size_t window) const {
  return window_mean(episodes, 0, std::min(window, episodes.size()));
}

double TrainingLog::trailing_mean(std::size_t window) const {
  const std::size_t n = episodes.size();
  return window_mean(episodes, n - std::min(window, n), n);
}

TrainingLog train(Environment& env, PolicyParams& params, const TrainOptions& options) {
  const auto& hp = params.hyper;
  if (options.total_steps < hp.n_steps)
    throw ValidationError("total_steps must cover at least one rollout");
  if (params.n_observations != env.observation_count() || params.action_dim != env.action_dim())
    throw ValidationError("policy dimensions do not match the environment");

  TrainingLog log;
  std::mt19937_64 action_rng(derive_seed(options.seed, {0xac7ULL}));
  std::mt19937_64 shuffle_rng(derive_seed(options.seed, {0x5bfULL}));
  std::uint64_t episode_index = 0;
  int obs = env.reset(derive_seed(options.seed, {0xe915ULL, episode_index}));
  EpisodeRecord current;
  std::int64_t steps = 0;
  std::vector<Transition> rollout;
  rollout.reserve(static_cast<std::size_t>(hp.n_steps));

  for (int update = 1; steps < options.total_steps; ++update) {
    rollout.clear();
    UpdateRecord rec;
    rec.update = update;
    int finished = 0;
    for (int t = 0; t < hp.n_steps; ++t) {
      PolicySample s = policy_sample(params, obs, action_rng);
      Transition tr;
      tr.observation = obs;
      tr.value = params.value(obs);
      tr.log_prob = s.log_prob;
      const StepResult r = env.step({s.action.data(), static_cast<std::size_t>(s.action.size())});
      tr.action = std::move(s.action);
      tr.reward = r.reward;
      tr.terminated = r.terminated;
      tr.truncated = r.truncated;
      rollout.push_back(std::move(tr));
      ++steps;

      rec.thruster_util += r.info.thruster_util;
      rec.wheel_util += r.info.wheel_util;
      current.reward += r.reward;
      current.c_gt += r.info.c_gt;
      current.c_rw += r.info.c_rw;
      current.final_f1 = r.info.f1;
      ++current.steps;
      if (r.done()) {
        current.truncated = r.truncated;
        rec.f1 += current.final_f1;
        rec.c_gt += current.c_gt;
        rec.c_rw += current.c_rw;
        ++finished;
        log.episodes.push_back(current);
        current = EpisodeRecord{};
        obs = env.reset(derive_seed(options.seed, {0xe915ULL, ++episode_index}));
      } else {
        obs = r.observation;
      }
    }
    const double last_value = params.value(obs);
    const GaeResult gae = compute_gae(rollout, last_value, hp.gamma, hp.gae_lambda);
    rec.diagnostics = ppo_update(params, rollout, gae, shuffle_rng);

    rec.episodes = static_cast<int>(log.episodes.size());
    rec.steps = steps;
    rec.mean_reward_100 = log.trailing_mean(100);
    if (finished > 0) {
      rec.f1 /= finished;
      rec.c_gt /= finished;
      rec.c_rw /= finished;
    }
    rec.thruster_util /= hp.n_steps;
    rec.wheel_util /= hp.n_steps;
    log.updates.push_back(rec);
    if (options.on_update) options.on_update(rec);
  }
  return log;
}

std::vector<actuators::ActuationVector> extract_sequence(const PolicyParams& params,
                                                         int n_slots, std::size_t thrusters,
                                                         std::size_t wheels) {
  if (n_slots > params.n_observations)
    throw ValidationError("policy covers fewer slots than requested");
  std::vector<actuators::ActuationVector> seq;
  seq.reserve(static_cast<std::size_t>(n_slots));
  for (int o = 0; o < n_slots; ++o) {
    const Eigen::VectorXd mu = params.mean(o);
    seq.push_back(actuators::clamp_action({mu.data(), static_cast<std::size_t>(mu.size())},
                                          thrusters, wheels));
  }
  return seq;
}

EpisodeRecord evaluate_sequence(Environment& env,
                                const std::vector<actuators::ActuationVector>& sequence,
                                std::uint64_t seed) {
  EpisodeRecord rec;
  env.reset(seed);
  for (const auto& a : sequence) {
    std::vector<double> raw(a.thruster_duty);
    raw.insert(raw.end(), a.wheel_voltage_fraction.begin(), a.wheel_voltage_fraction.end());
    const StepResult r = env.step(raw);
    rec.reward += r.reward;
    rec.c_gt += r.info.c_gt;
    rec.c_rw += r.info.c_rw;
    rec.final_f1 = r.info.f1;
    ++rec.steps;
    if (r.done()) {
      rec.truncated = r.truncated;
      break;
    }
  }
  return rec;
}

Utilization sequence_utilization(const std::vector<actuators::ActuationVector>& sequence) {
  Utilization u;
  if (sequence.empty()) return u;
  u.thruster.assign(sequence.front().thruster_duty.size(), 0.0);
  u.wheel.assign(sequence.front().wheel_voltage_fraction.size(), 0.0);
  for (const auto& a : sequence) {
    for (std::size_t j = 0; j < u.thruster.size(); ++j) u.thruster[j] += a.thruster_duty[j];
    for (std::size_t w = 0; w < u.wheel.size(); ++w) u.wheel[w] += std::abs(a.wheel_voltage_fraction[w]);
  }
  const double n = static_cast<double>(sequence.size());
  for (auto& v : u.thruster) v /= n;
  for (auto& v : u.wheel) v /= n;
  if (!u.thruster.empty())
    u.thruster_mean = std::accumulate(u.thruster.begin(), u.thruster.end(), 0.0) / static_cast<double>(u.thruster.size());
  if (!u.wheel.empty())
    u.wheel_mean = std::accumulate(u.wheel.begin(), u.wheel.end(), 0.0) / static_cast<double>(u.wheel.size());
  return u;
}

double expected_thruster_utilization(const PolicyParams& params, std::size_t thrusters) {
  if (thrusters == 0) return 0.0;
  const Eigen::VectorXd ls = params.log_std();
  double total = 0.0;
  for (int o = 0; o < params.n_observations; ++o) {
    const Eigen::VectorXd mu = params.mean(o);
    for (std::size_t j = 0; j < thrusters; ++j)
      total += expected_unit_clamp(mu(static_cast<Eigen::Index>(j)), ls(static_cast<Eigen::Index>(j)));
  }
  return total / (static_cast<double>(thrusters) * params.n_observations);
}

void write_training_log_csv(std::ostream& out, const TrainingLog& log) {
  out << "update,episode,steps,mean_reward_100,f1,c_gt,c_rw,thruster_util,wheel_util\n";
  char buf[256];
  for (const auto& r : log.updates) {
    std::snprintf(buf, sizeof buf, "%d,%d,%" PRId64 ",%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  r.update, r.episodes, r.steps, r.mean_reward_100, r.f1, r.c_gt, r.c_rw,
                  r.thruster_util, r.wheel_util);
    out << buf;
  }
}

void write_episodes_csv(std::ostream& out, const TrainingLog& log) {
  out << "episode,reward,steps,final_f1,c_gt,c_rw,truncated\n";
  char buf[256];
  for (std::size_t i = 0; i < log.episodes.size(); ++i) {
    const auto& e = log.episodes[i];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%d,%.10g,%.10g,%.10g,%d\n", i, e.reward, e.steps,
                  e.final_f1, e.c_gt, e.c_rw, e.truncated ? 1 : 0);
    out << buf;
  }
}

}  // namespace inertid::rl
