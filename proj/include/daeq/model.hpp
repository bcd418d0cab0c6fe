#pragma once

#include <span>
#include <vector>

#include "daeq/data.hpp"
#include "daeq/quant.hpp"

namespace daeq {

using ModelParams = std::vector<GradientTensor>;

/// Dense ReLU network with a softmax cross-entropy head. Parameters are stored
/// as (W, b) tensor pairs per layer, W row-major [in, out].
class Mlp {
 public:
  Mlp(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t classes);

  /// Glorot-uniform weights, zero biases.
  ModelParams init(Rng& rng) const;
  std::size_t tensor_count() const { return 2 * (layers_.size() - 1); }
  std::size_t parameter_count() const;
  const std::vector<std::size_t>& layer_sizes() const { return layers_; }

  /// Mean cross-entropy over `batch` and its gradient with respect to every tensor.
  double loss_and_grad(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> batch,
                       ModelParams* grad) const;
  double loss(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> batch) const;
  int predict(const ModelParams& theta, std::span<const double> x) const;
  /// Number of correctly classified samples among `indices`.
  std::size_t correct(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> indices) const;

 private:
  std::vector<std::size_t> layers_;
};

ModelParams zeros_like(const ModelParams& theta);

struct LocalTrainResult {
  ModelParams delta;  // trained minus starting parameters
  double last_epoch_loss = 0.0;
};

/// E epochs of shuffled mini-batch SGD on `shard`, starting from theta.
LocalTrainResult local_train(const Mlp& model, const ModelParams& theta, const ToyDataset& data,
                             std::span<const std::size_t> shard, std::size_t epochs, std::size_t batch_size,
                             double eta, Rng& rng);

}  // namespace daeq
