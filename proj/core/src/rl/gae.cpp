#include "inertid/errors.hpp"
#include "inertid/rl/ppo.hpp"

namespace inertid::rl {

GaeResult compute_gae(const std::vector<Transition>& rollout, double last_value,
                      double gamma, double lambda) {
  if (rollout.empty()) throw ValidationError("rollout is empty");
  const Eigen::Index n = static_cast<Eigen::Index>(rollout.size());
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_advantage = 0.0;
  double next_value = last_value;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const Transition& tr = rollout[static_cast<std::size_t>(t)];
    const double live = tr.done() ? 0.0 : 1.0;
    const double delta = tr.reward + gamma * next_value * live - tr.value;
    next_advantage = delta + gamma * lambda * live * next_advantage;
    out.advantages(t) = next_advantage;
    out.returns(t) = next_advantage + tr.value;
    next_value = tr.value;
  }
  return out;
}

}  // namespace inertid::rl
