#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

#include "daeq/bytes.hpp"

namespace daeq {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);

// Deterministic ChaCha20 keystream. Every randomness consumer in the library
// takes one of these explicitly; nothing reads global entropy. Child streams
// are derived from the key, not from the current position, so the order in
// which siblings are created or consumed never changes their output.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const Digest& key);
  static Rng from_seed(std::string_view seed);
  static Rng from_seed(std::uint64_t seed);

  Rng child(std::string_view label, std::uint64_t index = 0) const;
  Rng child(std::string_view label, std::uint64_t a, std::uint64_t b) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  void fill(std::span<std::uint8_t> out);

  // Uniform in [0, bound); bound must be positive.
  std::uint64_t uniform_u64(std::uint64_t bound);
  BigInt uniform_below(const BigInt& bound);
  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  double normal();

 private:
  void refill();

  Digest key_;
  std::uint32_t block_counter_ = 0;
  std::uint64_t nonce_hi_ = 0;
  std::array<std::uint8_t, 512> buffer_{};
  std::size_t pos_ = 512;
};

/// Fisher-Yates with Rng::uniform_u64, so the permutation does not depend on
/// the standard library's distribution implementation.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_u64(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace daeq
