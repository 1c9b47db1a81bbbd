#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>

namespace inertid::rl {

/// Fully connected network with tanh hidden layers and a linear output layer.
/// The network owns no parameters: they live in a caller-supplied flat vector
/// laid out layer by layer as [W (out x in, column-major) | b].
class Mlp {
 public:
  Mlp() = default;
  /// `sizes` = {inputs, hidden..., outputs}.
  explicit Mlp(std::vector<int> sizes);

  int parameter_count() const { return parameter_count_; }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  /// Layer outputs kept for the backward pass.
  struct Trace {
    std::vector<Eigen::MatrixXd> activations;  // input, then each layer output
  };

  /// Batched forward pass, one sample per column of `x`.
  Eigen::MatrixXd forward(const double* params, const Eigen::MatrixXd& x,
                          Trace* trace = nullptr) const;

  /// Accumulates dLoss/dparams into `grad` given dLoss/doutput.
  void backward(const double* params, const Trace& trace,
                const Eigen::MatrixXd& grad_out, double* grad) const;

  /// Orthogonal weight initialisation with zero biases; `hidden_gain` scales
  /// hidden layers and `output_gain` the last one.
  void init_orthogonal(double* params, std::mt19937_64& rng, double hidden_gain,
                       double output_gain) const;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;  // start of each layer's weights
  int parameter_count_ = 0;
};

}  // namespace inertid::rl
