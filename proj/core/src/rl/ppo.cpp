#include <algorithm>
#include <cmath>
#include <numeric>

#include "inertid/errors.hpp"
#include "inertid/rl/ppo.hpp"

namespace inertid::rl {

LossTerms ppo_loss(const PolicyParams& p, const Eigen::VectorXd& theta,
                   const Minibatch& batch, Eigen::VectorXd* grad) {
  const auto& hp = p.hyper;
  const Eigen::Index b = static_cast<Eigen::Index>(batch.observations.size());
  if (b == 0) throw ValidationError("empty minibatch");
  const double inv_b = 1.0 / static_cast<double>(b);
  const Eigen::MatrixXd x = p.one_hot(batch.observations);

  Mlp::Trace pi_trace, v_trace;
  const Eigen::MatrixXd mu = p.policy_net.forward(theta.data(), x, grad ? &pi_trace : nullptr);
  const Eigen::VectorXd log_std = theta.segment(p.log_std_offset(), p.action_dim);
  const Eigen::RowVectorXd values =
      p.value_net.forward(theta.data() + p.value_offset(), x, grad ? &v_trace : nullptr).row(0);

  LossTerms out;
  out.ratios.resize(b);
  Eigen::VectorXd dlogp(b);  // dLoss/dlogp per sample
  const double lo = 1.0 - hp.clip_range, hi = 1.0 + hp.clip_range;
  double surrogate = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double lp = gaussian_log_prob(batch.actions.col(i), mu.col(i), log_std);
    const double log_ratio = lp - batch.old_log_probs(i);
    const double ratio = std::exp(log_ratio);
    const double adv = batch.advantages(i);
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, lo, hi) * adv;
    surrogate += std::min(unclipped, clipped);
    out.ratios(i) = ratio;
    // Gradient flows through the unclipped branch whenever it is the minimum.
    dlogp(i) = unclipped <= clipped ? -adv * ratio * inv_b : 0.0;
    if (std::abs(ratio - 1.0) > hp.clip_range) out.clip_fraction += inv_b;
    out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;
  }
  out.policy = -surrogate * inv_b;
  const Eigen::RowVectorXd err = values - batch.returns.transpose();
  out.value = err.squaredNorm() * inv_b;
  out.entropy = gaussian_entropy(log_std);
  out.total = out.policy - hp.ent_coef * out.entropy + hp.vf_coef * out.value;

  if (grad) {
    grad->setZero(theta.size());
    const Eigen::VectorXd inv_var = (-2.0 * log_std).array().exp();
    Eigen::MatrixXd dmu(p.action_dim, b);
    Eigen::VectorXd dlog_std = Eigen::VectorXd::Constant(p.action_dim, -hp.ent_coef);
    for (Eigen::Index i = 0; i < b; ++i) {
      const Eigen::VectorXd diff = batch.actions.col(i) - mu.col(i);
      // d logp / d mu = diff / var; d logp / d log_std = diff^2 / var - 1
      dmu.col(i) = dlogp(i) * diff.cwiseProduct(inv_var);
      dlog_std += dlogp(i) * (diff.array().square() * inv_var.array() - 1.0).matrix();
    }
    p.policy_net.backward(theta.data(), pi_trace, dmu, grad->data());
    grad->segment(p.log_std_offset(), p.action_dim) += dlog_std;
    const Eigen::MatrixXd dv = (2.0 * hp.vf_coef * inv_b) * err;
    p.value_net.backward(theta.data() + p.value_offset(), v_trace, dv,
                         grad->data() + p.value_offset());
  }
  return out;
}

UpdateDiagnostics ppo_update(PolicyParams& p, const std::vector<Transition>& rollout,
                             const GaeResult& gae, std::mt19937_64& rng) {
  const auto& hp = p.hyper;
  if (static_cast<int>(rollout.size()) != hp.n_steps)
    throw ValidationError("rollout must hold exactly n_steps transitions");
  const std::size_t n = rollout.size();
  UpdateDiagnostics diag;
  std::vector<std::size_t> order(n);
  Eigen::VectorXd grad;
  bool first = true;
  int counted = 0;

  for (int epoch = 0; epoch < hp.n_epochs && !diag.aborted; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(hp.batch_size));
      const Eigen::Index b = static_cast<Eigen::Index>(end - start);
      Minibatch mb;
      mb.actions.resize(p.action_dim, b);
      mb.old_log_probs.resize(b);
      mb.advantages.resize(b);
      mb.returns.resize(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const std::size_t k = order[start + static_cast<std::size_t>(i)];
        mb.observations.push_back(rollout[k].observation);
        mb.actions.col(i) = rollout[k].action;
        mb.old_log_probs(i) = rollout[k].log_prob;
        mb.advantages(i) = gae.advantages(static_cast<Eigen::Index>(k));
        mb.returns(i) = gae.returns(static_cast<Eigen::Index>(k));
      }
      if (hp.normalize_advantage && b > 1) {
        const double mean = mb.advantages.mean();
        const double sd = std::sqrt((mb.advantages.array() - mean).square().sum() /
                                    static_cast<double>(b - 1));
        mb.advantages = (mb.advantages.array() - mean) / (sd + 1e-8);
      }

      const LossTerms loss = ppo_loss(p, p.theta, mb, &grad);
      if (first) {
        diag.first_batch_ratio_error = (loss.ratios.array() - 1.0).abs().maxCoeff();
        first = false;
      }
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        diag.aborted = true;
        break;
      }
      diag.grad_norm = grad.norm();
      if (diag.grad_norm > hp.max_grad_norm) grad *= hp.max_grad_norm / diag.grad_norm;

      ++p.adam_step;
      const double t = static_cast<double>(p.adam_step);
      p.adam_m = hp.adam_beta1 * p.adam_m + (1.0 - hp.adam_beta1) * grad;
      p.adam_v = hp.adam_beta2 * p.adam_v + (1.0 - hp.adam_beta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(hp.adam_beta1, t);
      const double c2 = 1.0 - std::pow(hp.adam_beta2, t);
      p.theta.array() -= hp.learning_rate * (p.adam_m.array() / c1) /
                         ((p.adam_v.array() / c2).sqrt() + hp.adam_eps);

      diag.policy_loss += loss.policy;
      diag.value_loss += loss.value;
      diag.entropy += loss.entropy;
      diag.approx_kl += loss.approx_kl;
      diag.clip_fraction += loss.clip_fraction;
      ++counted;
    }
  }
  diag.minibatches = counted;
  if (counted > 0) {
    diag.policy_loss /= counted;
    diag.value_loss /= counted;
    diag.entropy /= counted;
    diag.approx_kl /= counted;
    diag.clip_fraction /= counted;
  }
  return diag;
}

}  // namespace inertid::rl
