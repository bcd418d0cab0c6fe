#include "daeq/model.hpp"

#include <algorithm>
#include <cmath>

#include "daeq/errors.hpp"

namespace daeq {

Mlp::Mlp(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t classes) {
  if (input_dim == 0 || classes < 2) throw ConfigError("model needs input_dim >= 1 and classes >= 2");
  layers_.push_back(input_dim);
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("hidden layer width must be positive");
    layers_.push_back(h);
  }
  layers_.push_back(classes);
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) n += layers_[l] * layers_[l + 1] + layers_[l + 1];
  return n;
}

ModelParams Mlp::init(Rng& rng) const {
  ModelParams theta;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const std::size_t in = layers_[l], out = layers_[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    GradientTensor w{{in, out}, std::vector<double>(in * out)};
    for (auto& v : w.values) v = (2.0 * rng.uniform01() - 1.0) * limit;
    theta.push_back(std::move(w));
    theta.push_back(GradientTensor{{out}, std::vector<double>(out, 0.0)});
  }
  return theta;
}

ModelParams zeros_like(const ModelParams& theta) {
  ModelParams out = theta;
  for (auto& t : out) std::fill(t.values.begin(), t.values.end(), 0.0);
  return out;
}

namespace {

// Activations per layer for one sample; the last entry holds softmax probabilities.
std::vector<std::vector<double>> forward(const std::vector<std::size_t>& layers, const ModelParams& theta,
                                         std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  acts.emplace_back(x.begin(), x.end());
  const std::size_t depth = layers.size() - 1;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t in = layers[l], out = layers[l + 1];
    const auto& w = theta[2 * l].values;
    const auto& b = theta[2 * l + 1].values;
    std::vector<double> z(b);
    const auto& a = acts.back();
    for (std::size_t i = 0; i < in; ++i) {
      const double ai = a[i];
      if (ai == 0.0) continue;
      const double* row = w.data() + i * out;
      for (std::size_t o = 0; o < out; ++o) z[o] += ai * row[o];
    }
    if (l + 1 < depth) {
      for (auto& v : z) v = std::max(0.0, v);
    } else {
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (auto& v : z) {
        v = std::exp(v - mx);
        sum += v;
      }
      for (auto& v : z) v /= sum;
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

}  // namespace

double Mlp::loss_and_grad(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> batch,
                          ModelParams* grad) const {
  if (batch.empty()) return 0.0;
  if (grad) *grad = zeros_like(theta);
  const std::size_t depth = layers_.size() - 1;
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t idx : batch) {
    const auto acts = forward(layers_, theta, data.row(idx));
    const auto label = static_cast<std::size_t>(data.labels[idx]);
    total -= std::log(std::max(acts.back()[label], 1e-300));
    if (!grad) continue;
    // delta = dLoss/dz for the current layer.
    std::vector<double> delta = acts.back();
    delta[label] -= 1.0;
    for (std::size_t l = depth; l-- > 0;) {
      const std::size_t in = layers_[l], out = layers_[l + 1];
      auto& gw = (*grad)[2 * l].values;
      auto& gb = (*grad)[2 * l + 1].values;
      const auto& a = acts[l];
      for (std::size_t o = 0; o < out; ++o) gb[o] += inv * delta[o];
      for (std::size_t i = 0; i < in; ++i) {
        const double ai = a[i] * inv;
        if (ai == 0.0) continue;
        double* row = gw.data() + i * out;
        for (std::size_t o = 0; o < out; ++o) row[o] += ai * delta[o];
      }
      if (l == 0) break;
      const auto& w = theta[2 * l].values;
      std::vector<double> prev(in, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        if (a[i] <= 0.0) continue;  // ReLU derivative
        const double* row = w.data() + i * out;
        double s = 0.0;
        for (std::size_t o = 0; o < out; ++o) s += row[o] * delta[o];
        prev[i] = s;
      }
      delta = std::move(prev);
    }
  }
  return total * inv;
}

double Mlp::loss(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> batch) const {
  return loss_and_grad(theta, data, batch, nullptr);
}

int Mlp::predict(const ModelParams& theta, std::span<const double> x) const {
  const auto acts = forward(layers_, theta, x);
  const auto& p = acts.back();
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::size_t Mlp::correct(const ModelParams& theta, const ToyDataset& data, std::span<const std::size_t> indices) const {
  std::size_t hits = 0;
  for (std::size_t idx : indices) hits += predict(theta, data.row(idx)) == data.labels[idx] ? 1 : 0;
  return hits;
}

LocalTrainResult local_train(const Mlp& model, const ModelParams& theta, const ToyDataset& data,
                             std::span<const std::size_t> shard, std::size_t epochs, std::size_t batch_size,
                             double eta, Rng& rng) {
  if (shard.empty()) throw Error("local_train: empty shard");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  ModelParams local = theta;
  LocalTrainResult result;
  std::vector<std::size_t> order(shard.begin(), shard.end());
  ModelParams grad;
  for (std::size_t e = 0; e < epochs; ++e) {
    shuffle(std::span(order), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t len = std::min(batch_size, order.size() - start);
      std::span<const std::size_t> batch(order.data() + start, len);
      epoch_loss += model.loss_and_grad(local, data, batch, &grad) * static_cast<double>(len);
      for (std::size_t t = 0; t < local.size(); ++t) {
        auto& v = local[t].values;
        const auto& g = grad[t].values;
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= eta * g[k];
      }
    }
    result.last_epoch_loss = epoch_loss / static_cast<double>(order.size());
  }
  result.delta = local;
  for (std::size_t t = 0; t < local.size(); ++t) {
    for (std::size_t k = 0; k < local[t].values.size(); ++k) result.delta[t].values[k] -= theta[t].values[k];
  }
  return result;
}

}  // namespace daeq
