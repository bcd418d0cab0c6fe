#include "daeq/rng.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include <sodium.h>

#include "daeq/errors.hpp"

namespace daeq {
namespace {

struct SodiumInit {
  SodiumInit() {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  }
};

void ensure_sodium() { static SodiumInit init; }

void append_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Rng::Rng(const Digest& key) : key_(key) { ensure_sodium(); }

Rng Rng::from_seed(std::string_view seed) {
  Bytes buf{'d', 'a', 'e', 'q', 0};
  buf.insert(buf.end(), seed.begin(), seed.end());
  return Rng(sha256(buf));
}

Rng Rng::from_seed(std::uint64_t seed) {
  Bytes buf{'d', 'a', 'e', 'q', 1};
  append_u64(buf, seed);
  return Rng(sha256(buf));
}

Rng Rng::child(std::string_view label, std::uint64_t index) const { return child(label, index, 0); }

Rng Rng::child(std::string_view label, std::uint64_t a, std::uint64_t b) const {
  Bytes buf(key_.begin(), key_.end());
  buf.push_back(0xC1);
  buf.insert(buf.end(), label.begin(), label.end());
  buf.push_back(0);
  append_u64(buf, a);
  append_u64(buf, b);
  return Rng(sha256(buf));
}

void Rng::refill() {
  std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  for (int i = 0; i < 8; ++i) nonce[4 + i] = static_cast<std::uint8_t>(nonce_hi_ >> (8 * i));
  buffer_.fill(0);
  crypto_stream_chacha20_ietf_xor_ic(buffer_.data(), buffer_.data(), buffer_.size(), nonce.data(),
                                     block_counter_, key_.data());
  block_counter_ += static_cast<std::uint32_t>(buffer_.size() / 64);
  if (block_counter_ == 0) ++nonce_hi_;
  pos_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) refill();
    std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t Rng::uniform_u64(std::uint64_t bound) {
  if (bound == 0) throw Error("uniform_u64: zero bound");
  // Reject the lowest 2^64 mod bound values so the remainder is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v >= threshold) return v % bound;
  }
}

BigInt Rng::uniform_below(const BigInt& bound) {
  if (bound <= 0) throw Error("uniform_below: bound must be positive");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t nbytes = (bits + 7) / 8;
  const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  Bytes buf(nbytes);
  for (;;) {
    fill(buf);
    buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
    BigInt v = from_bytes(buf);
    if (v < bound) return v;
  }
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace daeq
