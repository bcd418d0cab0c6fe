#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace daeq {

using BigInt = mpz_class;
using Bytes = std::vector<std::uint8_t>;

// Minimal big-endian magnitude of a nonnegative integer (empty for zero).
Bytes to_bytes(const BigInt& value);
// Big-endian, left-padded to exactly `width` bytes. Throws if it does not fit.
Bytes to_fixed_bytes(const BigInt& value, std::size_t width);
BigInt from_bytes(std::span<const std::uint8_t> bytes);

std::size_t byte_length(const BigInt& value);
std::size_t bit_length(const BigInt& value);

std::string to_hex(const BigInt& value);
// Accepts "0x"-prefixed hex or plain decimal.
BigInt parse_bigint(const std::string& text);

// Wire helpers: u32 big-endian length prefix followed by the magnitude.
class ByteWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void bigint(const BigInt& v);
  void fixed(const BigInt& v, std::size_t width);
  void raw(std::span<const std::uint8_t> data);
  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint32_t u32();
  std::uint64_t u64();
  BigInt bigint();
  BigInt fixed(std::size_t width);
  Bytes raw(std::size_t n);
  bool done() const { return offset_ == in_.size(); }

 private:
  std::span<const std::uint8_t> need(std::size_t n);
  std::span<const std::uint8_t> in_;
  std::size_t offset_ = 0;
};

}  // namespace daeq
