#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "daeq/codec.hpp"
#include "daeq/rng.hpp"

namespace daeq {

struct GradientTensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

/// s * dirs approximates the source tensor; dirs_k in {-1, 0, +1}.
struct TernaryGradient {
  double s = 0.0;
  std::vector<std::int8_t> dirs;
};

/// One parameter tensor's upload: ternary directions in the clear and the
/// pre-weighted scalar encoded for encryption.
struct QuantizedTensor {
  TernaryGradient ternary;
  Scalar encoded_scalar;
};

using QuantizedUpdate = std::vector<QuantizedTensor>;

/// Stochastic ternarisation: s = max|g|, dirs_k = sign(g_k) * Bernoulli(|g_k| / s).
TernaryGradient ternarize(const GradientTensor& g, Rng& rng);

/// encode(s * n_i / n). The server-side ciphertext product then encrypts the
/// weighted average of the client scalars.
Scalar scale_and_encode(double s, std::uint64_t n_i, std::uint64_t n, const EncodingConfig& cfg);

/// Element-wise integer sum of ternary tensors. Throws ShapeMismatch.
std::vector<std::int32_t> aggregate_ternary(std::span<const std::vector<std::int8_t>> dirs);

/// Plaintext form of the encrypted scalar aggregate: sum_i s_i * n_i / n.
double weighted_scalar_sum(std::span<const double> scalars, std::span<const std::uint64_t> sizes);

/// Exact weighted aggregate sum_i (n_i/n) s_i dirs_i of the per-client ternary gradients.
std::vector<double> exact_ternary_aggregate(std::span<const TernaryGradient> grads,
                                            std::span<const std::uint64_t> sizes);

struct UpdateOptions {
  /// Extra step size on the server update. 1.0 applies the decoded aggregate as is.
  double server_lr = 1.0;
  /// Divides the summed directions; 1 keeps the plain sum.
  std::size_t ternary_divisor = 1;
};

/// theta -= (decode(Tm) / T) * summed_dirs * server_lr / ternary_divisor.
/// Returns the decoded global scalar decode(Tm) / T.
double apply_global_update(std::span<double> theta, std::span<const std::int32_t> summed_dirs, const BigInt& tm,
                           std::size_t threshold, const EncodingConfig& cfg, const UpdateOptions& opts = {});

/// Same update with an already-known global scalar (plaintext pipelines).
void apply_scaled_directions(std::span<double> theta, std::span<const std::int32_t> summed_dirs, double s_global,
                             const UpdateOptions& opts = {});

/// 2 bits per element (00 = 0, 01 = +1, 10 = -1), little-endian within each byte.
Bytes pack_ternary(std::span<const std::int8_t> dirs);
std::vector<std::int8_t> unpack_ternary(std::span<const std::uint8_t> bytes, std::size_t count);

}  // namespace daeq
