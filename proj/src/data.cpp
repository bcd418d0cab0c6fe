#include "daeq/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "daeq/errors.hpp"

namespace daeq {

ToyDataset make_blobs(const BlobSpec& spec, Rng& rng) {
  if (spec.classes < 2 || spec.dim < 1 || spec.samples_per_class < 1) throw ConfigError("degenerate blob spec");
  ToyDataset data;
  data.dim = spec.dim;
  data.classes = spec.classes;
  std::vector<std::vector<double>> centres(spec.classes, std::vector<double>(spec.dim));
  for (auto& c : centres) {
    double norm = 0.0;
    for (auto& v : c) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : c) v *= spec.separation / norm;
  }
  data.features.reserve(spec.classes * spec.samples_per_class * spec.dim);
  for (std::size_t k = 0; k < spec.classes; ++k) {
    for (std::size_t s = 0; s < spec.samples_per_class; ++s) {
      for (std::size_t d = 0; d < spec.dim; ++d) data.features.push_back(centres[k][d] + spec.noise * rng.normal());
      data.labels.push_back(static_cast<int>(k));
    }
  }
  return data;
}

void partition_noniid(ToyDataset& data, std::size_t clients, std::size_t classes_per_client, Rng& rng) {
  if (clients < 1) throw ConfigError("need at least one client");
  if (classes_per_client < 1) throw ConfigError("classes_per_client must be >= 1");
  data.partition.assign(clients, {});
  if (clients == 1) {
    data.partition[0].resize(data.samples());
    std::iota(data.partition[0].begin(), data.partition[0].end(), 0);
    return;
  }

  std::vector<std::vector<std::size_t>> by_class(data.classes);
  for (std::size_t i = 0; i < data.samples(); ++i) by_class.at(static_cast<std::size_t>(data.labels[i])).push_back(i);
  for (auto& members : by_class) shuffle(std::span(members), rng);

  // Shard budget per class, as even as possible.
  const std::size_t shards = clients * classes_per_client;
  std::vector<std::vector<std::size_t>> shard_list;
  for (std::size_t c = 0; c < data.classes; ++c) {
    const std::size_t k = shards / data.classes + (c < shards % data.classes ? 1 : 0);
    if (k == 0) continue;
    const auto& members = by_class[c];
    if (members.size() < k) {
      throw InfeasiblePartition("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                                " samples but needs " + std::to_string(k) + " shards");
    }
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t lo = members.size() * s / k;
      const std::size_t hi = members.size() * (s + 1) / k;
      shard_list.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(lo),
                              members.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  }
  // Shards are still label-sorted; striding by the client count spreads each
  // client's shards across classes.
  std::vector<std::size_t> owner(shard_list.size());
  std::vector<std::size_t> perm(clients);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(std::span(perm), rng);
  for (std::size_t s = 0; s < shard_list.size(); ++s) owner[s] = perm[s % clients];
  for (std::size_t s = 0; s < shard_list.size(); ++s) {
    auto& dst = data.partition[owner[s]];
    dst.insert(dst.end(), shard_list[s].begin(), shard_list[s].end());
  }
  for (auto& p : data.partition) std::sort(p.begin(), p.end());
}

void split_train_test(ToyDataset& data, double test_fraction, Rng& rng) {
  if (test_fraction < 0.0 || test_fraction >= 1.0) throw ConfigError("test_fraction must lie in [0, 1)");
  data.train.assign(data.partition.size(), {});
  data.test.assign(data.partition.size(), {});
  for (std::size_t c = 0; c < data.partition.size(); ++c) {
    std::vector<std::size_t> idx = data.partition[c];
    shuffle(std::span(idx), rng);
    std::size_t n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(idx.size())));
    if (test_fraction > 0.0 && n_test == 0 && idx.size() >= 2) n_test = 1;
    data.test[c].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    data.train[c].assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    std::sort(data.test[c].begin(), data.test[c].end());
    std::sort(data.train[c].begin(), data.train[c].end());
  }
}

}  // namespace daeq
