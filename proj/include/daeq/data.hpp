#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "daeq/rng.hpp"

namespace daeq {

/// Labelled dense samples plus a per-client split into train and test indices.
struct ToyDataset {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<double> features;  // row-major, samples x dim
  std::vector<int> labels;

  // Filled by partition_noniid / split_train_test.
  std::vector<std::vector<std::size_t>> partition;
  std::vector<std::vector<std::size_t>> train;
  std::vector<std::vector<std::size_t>> test;

  std::size_t samples() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
};

struct BlobSpec {
  std::size_t classes = 4;
  std::size_t dim = 20;
  std::size_t samples_per_class = 300;
  double separation = 3.0;
  double noise = 1.0;
};

/// Isotropic Gaussian blobs around random centres at distance `separation` from the origin.
ToyDataset make_blobs(const BlobSpec& spec, Rng& rng);

/// Label-sorted shards dealt so every client holds at most `classes_per_client`
/// distinct labels. Throws InfeasiblePartition when there are not enough
/// samples to cut N * classes_per_client nonempty single-class shards.
void partition_noniid(ToyDataset& data, std::size_t clients, std::size_t classes_per_client, Rng& rng);

/// Holds out `test_fraction` of every client's shard (at least one sample when
/// the shard has two or more). Train and test sets are disjoint.
void split_train_test(ToyDataset& data, double test_fraction, Rng& rng);

}  // namespace daeq
