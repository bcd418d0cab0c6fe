#include "daeq/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "daeq/errors.hpp"

namespace daeq {

TernaryGradient ternarize(const GradientTensor& g, Rng& rng) {
  TernaryGradient out;
  out.dirs.assign(g.size(), 0);
  for (double v : g.values) {
    if (!std::isfinite(v)) throw Error("ternarize: non-finite gradient");
    out.s = std::max(out.s, std::abs(v));
  }
  if (out.s == 0.0) return out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double v = g.values[k];
    if (v == 0.0) continue;
    // One uniform draw per nonzero component keeps the stream layout stable.
    if (rng.bernoulli(std::abs(v) / out.s)) out.dirs[k] = v > 0 ? 1 : -1;
  }
  return out;
}

Scalar scale_and_encode(double s, std::uint64_t n_i, std::uint64_t n, const EncodingConfig& cfg) {
  if (s < 0.0) throw Error("scale_and_encode: negative scalar");
  if (n == 0 || n_i > n) throw Error("scale_and_encode: need 0 <= n_i <= n, n > 0");
  return encode(s * static_cast<double>(n_i) / static_cast<double>(n), cfg);
}

std::vector<std::int32_t> aggregate_ternary(std::span<const std::vector<std::int8_t>> dirs) {
  if (dirs.empty()) return {};
  std::vector<std::int32_t> out(dirs.front().size(), 0);
  for (const auto& d : dirs) {
    if (d.size() != out.size()) {
      throw ShapeMismatch("ternary tensor of size " + std::to_string(d.size()) + ", expected " +
                          std::to_string(out.size()));
    }
    for (std::size_t k = 0; k < d.size(); ++k) out[k] += d[k];
  }
  return out;
}

double weighted_scalar_sum(std::span<const double> scalars, std::span<const std::uint64_t> sizes) {
  if (scalars.size() != sizes.size()) throw ShapeMismatch("scalars and sizes differ in length");
  std::uint64_t total = 0;
  for (auto n : sizes) total += n;
  double acc = 0.0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    acc += scalars[i] * static_cast<double>(sizes[i]) / static_cast<double>(total);
  }
  return acc;
}

std::vector<double> exact_ternary_aggregate(std::span<const TernaryGradient> grads,
                                            std::span<const std::uint64_t> sizes) {
  if (grads.size() != sizes.size()) throw ShapeMismatch("gradients and sizes differ in length");
  if (grads.empty()) return {};
  std::uint64_t total = 0;
  for (auto n : sizes) total += n;
  std::vector<double> out(grads.front().dirs.size(), 0.0);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].dirs.size() != out.size()) throw ShapeMismatch("ternary tensors differ in size");
    const double w = grads[i].s * static_cast<double>(sizes[i]) / static_cast<double>(total);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * grads[i].dirs[k];
  }
  return out;
}

void apply_scaled_directions(std::span<double> theta, std::span<const std::int32_t> summed_dirs, double s_global,
                             const UpdateOptions& opts) {
  if (theta.size() != summed_dirs.size()) throw ShapeMismatch("parameter and direction tensors differ in size");
  if (opts.ternary_divisor == 0) throw Error("ternary_divisor must be positive");
  const double step = s_global * opts.server_lr / static_cast<double>(opts.ternary_divisor);
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= step * summed_dirs[k];
}

double apply_global_update(std::span<double> theta, std::span<const std::int32_t> summed_dirs, const BigInt& tm,
                           std::size_t threshold, const EncodingConfig& cfg, const UpdateOptions& opts) {
  if (threshold == 0) throw Error("threshold must be positive");
  const double s_global = decode_integer(tm, cfg) / static_cast<double>(threshold);
  apply_scaled_directions(theta, summed_dirs, s_global, opts);
  return s_global;
}

Bytes pack_ternary(std::span<const std::int8_t> dirs) {
  Bytes out((dirs.size() + 3) / 4, 0);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    std::uint8_t code = 0;
    if (dirs[k] == 1) {
      code = 1;
    } else if (dirs[k] == -1) {
      code = 2;
    } else if (dirs[k] != 0) {
      throw Error("pack_ternary: value outside {-1, 0, 1}");
    }
    out[k / 4] |= static_cast<std::uint8_t>(code << (2 * (k % 4)));
  }
  return out;
}

std::vector<std::int8_t> unpack_ternary(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() != (count + 3) / 4) throw ParseError("packed ternary tensor has wrong length");
  std::vector<std::int8_t> out(count, 0);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint8_t code = (bytes[k / 4] >> (2 * (k % 4))) & 0x3;
    if (code == 3) throw ParseError("invalid ternary code");
    out[k] = code == 1 ? 1 : (code == 2 ? -1 : 0);
  }
  return out;
}

}  // namespace daeq
