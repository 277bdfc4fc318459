#include "crnd/zq.hpp"

#include <cmath>
#include <stdexcept>

namespace crnd {

bool is_prime(u64 q) {
  if (q < 2) return false;
  if (q % 2 == 0) return q == 2;
  for (u64 d = 3; d * d <= q; d += 2) {
    if (q % d == 0) return false;
  }
  return true;
}

unsigned coord_bits(u64 q) {
  unsigned k = 0;
  u64 v = q - 1;
  while (v > 0) {
    ++k;
    v >>= 1;
  }
  return k == 0 ? 1 : k;
}

u128 norm_sq(const ZqVector& v) {
  u128 acc = 0;
  for (u64 e : v.v) {
    i64 c = centered(e, v.q);
    acc += static_cast<u128>(c * c);
  }
  return acc;
}

double norm(const ZqVector& v) { return std::sqrt(static_cast<double>(norm_sq(v))); }

bool norm_sq_within(u128 sum, double width, std::size_t dim) {
  // Integer sums at desk scale fit a long double mantissa exactly; the small
  // relative slack keeps an exact integer boundary (width^2*dim integral)
  // inclusive despite the floating-point product.
  long double bound = static_cast<long double>(width) * width * static_cast<long double>(dim);
  return static_cast<long double>(sum) <= bound * (1.0L + 1e-12L) + 1e-9L;
}

bool norm_within(const ZqVector& v, double width) {
  return norm_sq_within(norm_sq(v), width, v.size());
}

ZqVector matvec(const ZqMatrix& m, const ZqVector& x) {
  if (m.cols != x.size() || m.q != x.q) throw std::invalid_argument("matvec: dimension/modulus mismatch");
  ZqVector out(m.q, m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    u128 acc = 0;
    const u64* row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) acc += static_cast<u128>(row[c]) * x[c];
    out[r] = static_cast<u64>(acc % m.q);
  }
  return out;
}

ZqVector add(const ZqVector& a, const ZqVector& b) {
  if (a.size() != b.size() || a.q != b.q) throw std::invalid_argument("add: dimension/modulus mismatch");
  ZqVector out(a.q, a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % a.q;
  return out;
}

ZqVector sub(const ZqVector& a, const ZqVector& b) {
  if (a.size() != b.size() || a.q != b.q) throw std::invalid_argument("sub: dimension/modulus mismatch");
  ZqVector out(a.q, a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + a.q - b[i] % a.q) % a.q;
  return out;
}

bool BitString::all_zero() const {
  for (auto b : bits)
    if (b) return false;
  return true;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitString BitString::parse(const std::string& s) {
  BitString out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("BitString::parse: not a 0/1 string");
    out[i] = s[i] == '1';
  }
  return out;
}

BitString binary_rep_scalar(u64 value, u64 q) {
  unsigned k = coord_bits(q);
  BitString out(k);
  u64 v = value % q;
  for (unsigned i = 0; i < k; ++i) out[i] = (v >> (k - 1 - i)) & 1;
  return out;
}

BitString binary_rep(const ZqVector& x) {
  unsigned k = coord_bits(x.q);
  BitString out(x.size() * k);
  for (std::size_t j = 0; j < x.size(); ++j) {
    u64 v = x[j] % x.q;
    for (unsigned i = 0; i < k; ++i) out[j * k + i] = (v >> (k - 1 - i)) & 1;
  }
  return out;
}

int gf2_dot(const BitString& d, const BitString& z) {
  if (d.size() != z.size()) throw std::invalid_argument("gf2_dot: length mismatch");
  int acc = 0;
  for (std::size_t i = 0; i < d.size(); ++i) acc ^= d[i] & z[i];
  return acc;
}

BitString xor_bits(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("xor_bits: length mismatch");
  BitString out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

ZqVector embed_bits(const BitString& s, u64 q) {
  ZqVector out(q, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i];
  return out;
}

namespace {
inline void fnv_u64(u64& h, u64 v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
}
}  // namespace

u64 digest_instance(const ZqMatrix& m, const ZqVector& u) {
  u64 h = 0xcbf29ce484222325ull;
  fnv_u64(h, m.q);
  fnv_u64(h, m.rows);
  fnv_u64(h, m.cols);
  for (u64 v : m.a) fnv_u64(h, v);
  for (u64 v : u.v) fnv_u64(h, v);
  return h;
}

}  // namespace crnd
