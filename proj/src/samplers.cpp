#include "crnd/samplers.hpp"

#include <algorithm>
#include <stdexcept>

namespace crnd {

ZqMatrix sample_uniform_matrix(u64 q, std::size_t rows, std::size_t cols, Rng& rng) {
  ZqMatrix m(q, rows, cols);
  for (auto& e : m.a) e = rng.below(q);
  return m;
}

ZqVector sample_uniform_vector(u64 q, std::size_t dim, Rng& rng) {
  ZqVector v(q, dim);
  for (auto& e : v.v) e = rng.below(q);
  return v;
}

BitString sample_uniform_bits(std::size_t n, Rng& rng) {
  BitString s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::uint8_t>(rng.bit());
  return s;
}

ZqVector Trapdoor::apply(const ZqVector& u) const {
  if (u.size() != head + width) throw std::invalid_argument("Trapdoor::apply: dimension mismatch");
  ZqVector v(u.q, width);
  for (std::size_t i = 0; i < width; ++i) {
    i64 acc = static_cast<i64>(u[head + i] % u.q);
    for (std::size_t c = 0; c < head; ++c) {
      std::int8_t rc = r_at(i, c);
      if (rc == 1)
        acc -= static_cast<i64>(u[c] % u.q);
      else if (rc == -1)
        acc += static_cast<i64>(u[c] % u.q);
    }
    i64 q = static_cast<i64>(u.q);
    acc %= q;
    if (acc < 0) acc += q;
    v[i] = static_cast<u64>(acc);
  }
  return v;
}

ZqMatrix gadget_matrix(const ParameterSet& p) {
  unsigned k = coord_bits(p.modulus);
  ZqMatrix g(p.modulus, static_cast<std::size_t>(p.secret_dim) * k, p.secret_dim);
  for (unsigned j = 0; j < p.secret_dim; ++j)
    for (unsigned i = 0; i < k; ++i) g.at(static_cast<std::size_t>(j) * k + i, j) = (u64{1} << i) % p.modulus;
  return g;
}

TrapdoorSample gen_trap(const ParameterSet& p, Rng& rng) {
  unsigned k = coord_bits(p.modulus);
  std::size_t w = static_cast<std::size_t>(p.secret_dim) * k;
  if (p.image_dim < w + p.secret_dim)
    throw std::invalid_argument("gen_trap: image_dim must be at least bit_width + secret_dim");
  std::size_t head = p.image_dim - w;

  ZqMatrix abar = sample_uniform_matrix(p.modulus, head, p.secret_dim, rng);

  Trapdoor t;
  t.width = w;
  t.head = head;
  t.k = k;
  t.r.resize(w * head);
  for (auto& e : t.r) e = static_cast<std::int8_t>(rng.below(3)) - 1;

  ZqMatrix g = gadget_matrix(p);
  ZqMatrix a(p.modulus, p.image_dim, p.secret_dim);
  for (std::size_t r = 0; r < head; ++r)
    for (std::size_t c = 0; c < p.secret_dim; ++c) a.at(r, c) = abar.at(r, c);
  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t c = 0; c < p.secret_dim; ++c) {
      u128 acc = g.at(r, c);
      for (std::size_t h = 0; h < head; ++h) {
        std::int8_t rc = t.r_at(r, h);
        if (rc == 1)
          acc += abar.at(h, c);
        else if (rc == -1)
          acc += p.modulus - abar.at(h, c);
      }
      a.at(head + r, c) = static_cast<u64>(acc % p.modulus);
    }
  }
  return {std::move(a), std::move(t)};
}

u64 decode_noise_bound(u64 q) { return q / 8; }

namespace {

struct Interval {
  i64 lo, hi;
};

i64 div_floor(i64 num, i64 den) {
  i64 d = num / den, r = num % den;
  return (r != 0 && ((r < 0) != (den < 0))) ? d - 1 : d;
}
i64 div_ceil(i64 num, i64 den) { return -div_floor(-num, den); }

// Decode sigma in [0, q) from block[i] = sigma*2^i + t_i (mod q), |t_i| <= beta.
std::optional<u64> decode_gadget_block(const std::vector<u64>& block, u64 q, u64 beta) {
  const i64 qi = static_cast<i64>(q);
  const i64 b = static_cast<i64>(beta);

  std::vector<Interval> cur;
  {
    i64 v0 = static_cast<i64>(block[0] % q);
    i64 lo = v0 - b, hi = v0 + b;
    if (lo < 0) {
      cur.push_back({0, hi});
      cur.push_back({lo + qi, qi - 1});
    } else if (hi >= qi) {
      cur.push_back({lo, qi - 1});
      cur.push_back({0, hi - qi});
    } else {
      cur.push_back({lo, hi});
    }
  }

  for (std::size_t i = 1; i < block.size(); ++i) {
    i64 vi = static_cast<i64>(block[i] % q);
    i64 p2 = i64{1} << i;
    std::vector<Interval> next;
    for (const Interval& iv : cur) {
      i64 jmin = div_ceil(iv.lo * p2 - vi - b, qi);
      i64 jmax = div_floor(iv.hi * p2 - vi + b, qi);
      for (i64 j = jmin; j <= jmax; ++j) {
        i64 nlo = std::max(iv.lo, div_ceil(vi - b + j * qi, p2));
        i64 nhi = std::min(iv.hi, div_floor(vi + b + j * qi, p2));
        if (nlo <= nhi) next.push_back({nlo, nhi});
      }
    }
    if (next.size() > 32) return std::nullopt;  // noise beyond the decode margin
    cur = std::move(next);
    if (cur.empty()) return std::nullopt;
  }

  // Residual check over the surviving candidates; exactly one may pass.
  std::optional<u64> found;
  u64 candidates = 0;
  for (const Interval& iv : cur) {
    for (i64 s = iv.lo; s <= iv.hi; ++s) {
      if (++candidates > 4096) return std::nullopt;
      bool good = true;
      for (std::size_t i = 0; i < block.size(); ++i) {
        u128 gs = (static_cast<u128>(u64{1} << i) * static_cast<u64>(s)) % q;
        u64 diff = (block[i] + q - static_cast<u64>(gs)) % q;
        i64 c = centered(diff, q);
        if (c < -b || c > b) {
          good = false;
          break;
        }
      }
      if (good) {
        if (found && *found != static_cast<u64>(s)) return std::nullopt;  // ambiguous
        found = static_cast<u64>(s);
      }
    }
  }
  return found;
}

}  // namespace

std::optional<std::pair<ZqVector, ZqVector>> invert(const ZqMatrix& a, const Trapdoor& t,
                                                    const ZqVector& u, const ParameterSet& p) {
  if (a.rows != u.size() || a.q != u.q) throw std::invalid_argument("invert: dimension mismatch");
  ZqVector v = t.apply(u);
  u64 beta = decode_noise_bound(a.q);

  ZqVector s(a.q, a.cols);
  std::vector<u64> block(t.k);
  for (std::size_t j = 0; j < a.cols; ++j) {
    for (unsigned i = 0; i < t.k; ++i) block[i] = v[j * t.k + i];
    auto sj = decode_gadget_block(block, a.q, beta);
    if (!sj) return std::nullopt;
    s[j] = *sj;
  }

  ZqVector e = sub(u, matvec(a, s));
  if (!norm_within(e, p.b_preimage)) return std::nullopt;
  return std::make_pair(std::move(s), std::move(e));
}

LossySample sample_lossy(const ParameterSet& p, Rng& rng) {
  LossySample out;
  out.witness.low_left = sample_uniform_matrix(p.modulus, p.image_dim, p.lossy_rank, rng);
  out.witness.low_right = sample_uniform_matrix(p.modulus, p.lossy_rank, p.secret_dim, rng);
  DGaussTable noise(p.modulus, p.b_lossy);
  out.witness.noise = ZqMatrix(p.modulus, p.image_dim, p.secret_dim);
  for (auto& e : out.witness.noise.a) e = noise.sample(rng);

  out.matrix = ZqMatrix(p.modulus, p.image_dim, p.secret_dim);
  for (std::size_t r = 0; r < p.image_dim; ++r) {
    for (std::size_t c = 0; c < p.secret_dim; ++c) {
      u128 acc = out.witness.noise.at(r, c);
      for (std::size_t k = 0; k < p.lossy_rank; ++k)
        acc += static_cast<u128>(out.witness.low_left.at(r, k)) * out.witness.low_right.at(k, c);
      out.matrix.at(r, c) = static_cast<u64>(acc % p.modulus);
    }
  }
  return out;
}

}  // namespace crnd
