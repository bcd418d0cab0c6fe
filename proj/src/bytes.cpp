#include "daeq/bytes.hpp"

#include <algorithm>
#include <cctype>

#include "daeq/errors.hpp"

namespace daeq {

Bytes to_bytes(const BigInt& value) {
  if (sgn(value) < 0) throw Error("to_bytes: negative value");
  if (value == 0) return {};
  std::size_t count = 0;
  Bytes out(byte_length(value));
  mpz_export(out.data(), &count, 1, 1, 1, 0, value.get_mpz_t());
  out.resize(count);
  return out;
}

Bytes to_fixed_bytes(const BigInt& value, std::size_t width) {
  Bytes mag = to_bytes(value);
  if (mag.size() > width) throw Error("to_fixed_bytes: value exceeds width");
  Bytes out(width - mag.size(), 0);
  out.insert(out.end(), mag.begin(), mag.end());
  return out;
}

BigInt from_bytes(std::span<const std::uint8_t> bytes) {
  BigInt out;
  if (!bytes.empty()) {
    mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return out;
}

std::size_t bit_length(const BigInt& value) {
  if (value == 0) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 2);
}

std::size_t byte_length(const BigInt& value) { return (bit_length(value) + 7) / 8; }

std::string to_hex(const BigInt& value) { return "0x" + value.get_str(16); }

BigInt parse_bigint(const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }),
          t.end());
  int base = 10;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    base = 16;
    t = t.substr(2);
  }
  BigInt out;
  if (t.empty() || out.set_str(t, base) != 0 || sgn(out) < 0) {
    throw ParseError("not a nonnegative integer: '" + text + "'");
  }
  return out;
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::bigint(const BigInt& v) {
  Bytes mag = to_bytes(v);
  u32(static_cast<std::uint32_t>(mag.size()));
  raw(mag);
}

void ByteWriter::fixed(const BigInt& v, std::size_t width) { raw(to_fixed_bytes(v, width)); }

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

std::span<const std::uint8_t> ByteReader::need(std::size_t n) {
  if (offset_ + n > in_.size()) throw ParseError("truncated message");
  auto s = in_.subspan(offset_, n);
  offset_ += n;
  return s;
}

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (auto b : need(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (auto b : need(8)) v = (v << 8) | b;
  return v;
}

BigInt ByteReader::bigint() { return from_bytes(need(u32())); }

BigInt ByteReader::fixed(std::size_t width) { return from_bytes(need(width)); }

Bytes ByteReader::raw(std::size_t n) {
  auto s = need(n);
  return Bytes(s.begin(), s.end());
}

}  // namespace daeq
