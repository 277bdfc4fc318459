#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "crnd/dgauss.hpp"
#include "crnd/params.hpp"
#include "crnd/rng.hpp"
#include "crnd/zq.hpp"

namespace crnd {

ZqMatrix sample_uniform_matrix(u64 q, std::size_t rows, std::size_t cols, Rng& rng);
ZqVector sample_uniform_vector(u64 q, std::size_t dim, Rng& rng);
BitString sample_uniform_bits(std::size_t n, Rng& rng);

// Trapdoor for A = [Abar; G + R*Abar]: R has entries in {-1,0,1} and
// [-R | I_w] * A = G holds exactly, where G stacks the powers 2^0..2^(k-1)
// per secret coordinate.
struct Trapdoor {
  std::size_t width = 0;      // w, number of gadget rows
  std::size_t head = 0;       // m - w, number of uniform rows
  unsigned k = 0;             // gadget bits per coordinate
  std::vector<std::int8_t> r; // width x head, row-major

  std::int8_t r_at(std::size_t row, std::size_t col) const { return r[row * head + col]; }

  // v = [-R | I] * u for u in Z_q^(head+width).
  ZqVector apply(const ZqVector& u) const;
};

struct TrapdoorSample {
  ZqMatrix matrix;  // (head + width) x n
  Trapdoor trapdoor;
};

// Requires image_dim >= bit_width + secret_dim (room for the uniform block).
TrapdoorSample gen_trap(const ParameterSet& p, Rng& rng);

// The gadget matrix [-R | I]*A equals; exposed for tests.
ZqMatrix gadget_matrix(const ParameterSet& p);

// Recovers (s, e) from u = A*s + e. Decoding runs per coordinate on the
// gadget block of [-R | I]*u by halving candidate intervals, then the result
// is re-verified; ambiguity or a residual above b_preimage*sqrt(m) yields
// nullopt, never a silently wrong answer.
std::optional<std::pair<ZqVector, ZqVector>> invert(const ZqMatrix& a, const Trapdoor& t,
                                                    const ZqVector& u, const ParameterSet& p);

// Internal noise bound the decoder tolerates on [-R | I]*e, exposed so tests
// can measure the realized decode margin.
u64 decode_noise_bound(u64 q);

struct LossyWitness {
  ZqMatrix low_left;   // m x l, uniform
  ZqMatrix low_right;  // l x n, uniform
  ZqMatrix noise;      // m x n, entries from the width-b_lossy Gaussian
};

struct LossySample {
  ZqMatrix matrix;  // low_left*low_right + noise
  LossyWitness witness;
};

LossySample sample_lossy(const ParameterSet& p, Rng& rng);

}  // namespace crnd
