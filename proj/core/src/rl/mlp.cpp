#include "inertid/rl/mlp.hpp"

#include <Eigen/QR>

#include "inertid/errors.hpp"

namespace inertid::rl {

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ValidationError("an MLP needs input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw ValidationError("layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(parameter_count_);
    parameter_count_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

Eigen::MatrixXd Mlp::forward(const double* params, const Eigen::MatrixXd& x,
                             Trace* trace) const {
  if (x.rows() != sizes_.front()) throw ValidationError("MLP input size mismatch");
  Eigen::MatrixXd h = x;
  if (trace) {
    trace->activations.clear();
    trace->activations.push_back(h);
  }
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> w(params + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params + offsets_[l] + out * in, out);
    Eigen::MatrixXd z = (w * h).colwise() + b;
    if (l + 1 < layers) z = z.array().tanh().matrix();
    h = std::move(z);
    if (trace) trace->activations.push_back(h);
  }
  return h;
}

void Mlp::backward(const double* params, const Trace& trace,
                   const Eigen::MatrixXd& grad_out, double* grad) const {
  const std::size_t layers = sizes_.size() - 1;
  Eigen::MatrixXd delta = grad_out;  // dL/dz of the current layer
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l], out = sizes_[l + 1];
    Eigen::Map<const Eigen::MatrixXd> w(params + offsets_[l], out, in);
    Eigen::Map<Eigen::MatrixXd> gw(grad + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad + offsets_[l] + out * in, out);
    const Eigen::MatrixXd& input = trace.activations[l];
    gw.noalias() += delta * input.transpose();
    gb += delta.rowwise().sum();
    if (l == 0) break;
    // input is tanh output of the previous layer: d tanh = 1 - tanh^2
    delta = ((w.transpose() * delta).array() * (1.0 - input.array().square())).matrix();
  }
}

void Mlp::init_orthogonal(double* params, std::mt19937_64& rng, double hidden_gain,
                          double output_gain) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const int big = std::max(in, out), small = std::min(in, out);
    Eigen::MatrixXd g(big, small);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    // Sign fix so the distribution is uniform over orthogonal matrices.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
    for (int c = 0; c < small; ++c)
      if (r(c, c) < 0.0) q.col(c) *= -1.0;
    const double gain = l + 1 < layers ? hidden_gain : output_gain;
    Eigen::Map<Eigen::MatrixXd> w(params + offsets_[l], out, in);
    if (out >= in)
      w = gain * q;
    else
      w = gain * q.transpose();
    Eigen::Map<Eigen::VectorXd>(params + offsets_[l] + out * in, out).setZero();
  }
}

}  // namespace inertid::rl
