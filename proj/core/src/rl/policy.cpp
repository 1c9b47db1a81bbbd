#include "inertid/rl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "inertid/errors.hpp"

namespace inertid::rl {

void validate(const PpoHyperparams& hp) {
  if (hp.n_steps < 1 || hp.batch_size < 1 || hp.n_epochs < 1 || hp.hidden_units < 1)
    throw ValidationError("PPO step, batch, epoch and layer sizes must be positive");
  if (!(hp.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(hp.gamma >= 0.0 && hp.gamma <= 1.0) || !(hp.gae_lambda >= 0.0 && hp.gae_lambda <= 1.0))
    throw ValidationError("gamma and gae_lambda must lie in [0, 1]");
  if (!(hp.clip_range > 0.0)) throw ValidationError("clip range must be positive");
  if (!(hp.ent_coef >= 0.0) || !(hp.vf_coef >= 0.0) || !(hp.max_grad_norm > 0.0))
    throw ValidationError("loss coefficients must be non-negative");
}

PolicyParams::PolicyParams(int n_obs, int act_dim, const PpoHyperparams& hp,
                           std::uint64_t seed)
    : n_observations(n_obs),
      action_dim(act_dim),
      hyper(hp),
      policy_net({n_obs, hp.hidden_units, hp.hidden_units, act_dim}),
      value_net({n_obs, hp.hidden_units, hp.hidden_units, 1}) {
  validate(hp);
  if (n_obs < 1 || act_dim < 1)
    throw ValidationError("observation and action sizes must be positive");
  theta.setZero(value_offset() + value_net.parameter_count());
  std::mt19937_64 rng(seed);
  const double hidden_gain = std::sqrt(2.0);
  policy_net.init_orthogonal(theta.data(), rng, hidden_gain, 0.01);
  theta.segment(log_std_offset(), action_dim).setConstant(hp.log_std_init);
  value_net.init_orthogonal(theta.data() + value_offset(), rng, hidden_gain, 1.0);
  adam_m.setZero(theta.size());
  adam_v.setZero(theta.size());
}

Eigen::VectorXd PolicyParams::one_hot(int observation) const {
  if (observation < 0 || observation >= n_observations)
    throw ValidationError("observation outside the slot range");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_observations);
  x(observation) = 1.0;
  return x;
}

Eigen::MatrixXd PolicyParams::one_hot(const std::vector<int>& observations) const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_observations,
                                            static_cast<Eigen::Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const int o = observations[i];
    if (o < 0 || o >= n_observations) throw ValidationError("observation outside the slot range");
    x(o, static_cast<Eigen::Index>(i)) = 1.0;
  }
  return x;
}

Eigen::VectorXd PolicyParams::mean(int observation) const {
  return policy_net.forward(theta.data(), one_hot(observation)).col(0);
}

double PolicyParams::value(int observation) const {
  return value_net.forward(theta.data() + value_offset(), one_hot(observation))(0, 0);
}

double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double z = (x(d) - mean(d)) * std::exp(-log_std(d));
    lp += -0.5 * z * z - log_std(d) - half_log_2pi;
  }
  return lp;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  const double per_dim = 0.5 + 0.5 * std::log(2.0 * std::numbers::pi);
  return static_cast<double>(log_std.size()) * per_dim + log_std.sum();
}

PolicySample policy_sample(const PolicyParams& params, int observation,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PolicySample s;
  const Eigen::VectorXd mu = params.mean(observation);
  const Eigen::VectorXd ls = params.log_std();
  s.action.resize(mu.size());
  for (Eigen::Index d = 0; d < mu.size(); ++d) s.action(d) = mu(d) + std::exp(ls(d)) * normal(rng);
  s.log_prob = gaussian_log_prob(s.action, mu, ls);
  return s;
}

double expected_unit_clamp(double mean, double log_std) {
  const double sigma = std::exp(log_std);
  if (!(sigma > 1e-300)) return std::clamp(mean, 0.0, 1.0);
  // E[clamp(X,0,1)] = int_0^1 P(X > t) dt = sigma [G(m/s) - G((m-1)/s)],
  // with G(x) = x Phi(x) + phi(x).
  auto big_g = [](double x) {
    const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return x * cdf + pdf;
  };
  return sigma * (big_g(mean / sigma) - big_g((mean - 1.0) / sigma));
}

}  // namespace inertid::rl
