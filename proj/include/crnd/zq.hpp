#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crnd {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Trial division; moduli stay well below 2^63 so this is cheap enough to run
// once per parameter set.
bool is_prime(u64 q);

// Number of bits of the per-coordinate binary representation, ceil(log2 q).
unsigned coord_bits(u64 q);

// Representative of v mod q in [-(q-1)/2, (q-1)/2].
inline i64 centered(u64 v, u64 q) {
  u64 r = v % q;
  return r > (q - 1) / 2 ? static_cast<i64>(r) - static_cast<i64>(q) : static_cast<i64>(r);
}

struct ZqVector {
  u64 q = 0;
  std::vector<u64> v;

  ZqVector() = default;
  ZqVector(u64 modulus, std::size_t dim) : q(modulus), v(dim, 0) {}
  ZqVector(u64 modulus, std::vector<u64> entries) : q(modulus), v(std::move(entries)) {}

  std::size_t size() const { return v.size(); }
  u64& operator[](std::size_t i) { return v[i]; }
  u64 operator[](std::size_t i) const { return v[i]; }
  bool operator==(const ZqVector& o) const { return q == o.q && v == o.v; }
};

struct ZqMatrix {
  u64 q = 0;
  std::size_t rows = 0, cols = 0;
  std::vector<u64> a;  // row-major

  ZqMatrix() = default;
  ZqMatrix(u64 modulus, std::size_t r, std::size_t c) : q(modulus), rows(r), cols(c), a(r * c, 0) {}

  u64& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  u64 at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
  const u64* row(std::size_t r) const { return a.data() + r * cols; }
  bool operator==(const ZqMatrix& o) const {
    return q == o.q && rows == o.rows && cols == o.cols && a == o.a;
  }
};

// Exact integer sum of squared centered entries.
u128 norm_sq(const ZqVector& v);

// Euclidean norm of the centered representatives.
double norm(const ZqVector& v);

// norm(v) <= width*sqrt(dim), decided against the exact integer norm_sq so the
// boundary case is inclusive. dim defaults to v.size().
bool norm_within(const ZqVector& v, double width);
bool norm_sq_within(u128 sum, double width, std::size_t dim);

ZqVector matvec(const ZqMatrix& m, const ZqVector& x);
ZqVector add(const ZqVector& a, const ZqVector& b);
ZqVector sub(const ZqVector& a, const ZqVector& b);

struct BitString {
  std::vector<std::uint8_t> bits;  // values 0/1

  BitString() = default;
  explicit BitString(std::size_t n) : bits(n, 0) {}

  std::size_t size() const { return bits.size(); }
  std::uint8_t& operator[](std::size_t i) { return bits[i]; }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  bool operator==(const BitString& o) const { return bits == o.bits; }
  bool all_zero() const;
  std::string to_string() const;  // "0101..."
  static BitString parse(const std::string& s);
};

// MSB-first binary representation, coord_bits(q) bits per value.
BitString binary_rep_scalar(u64 value, u64 q);

// Coordinate-wise concatenation, size() * coord_bits(q) bits total.
BitString binary_rep(const ZqVector& x);

int gf2_dot(const BitString& d, const BitString& z);
BitString xor_bits(const BitString& a, const BitString& b);

// Interprets bits as 0/1 elements of Z_q (used for x0 - s over Z_q).
ZqVector embed_bits(const BitString& s, u64 q);

// FNV-1a over a canonical byte serialization; transcript identification only.
u64 digest_instance(const ZqMatrix& m, const ZqVector& u);

}  // namespace crnd
