#pragma once

#include <cmath>
#include <vector>

#include "crnd/params.hpp"
#include "crnd/zq.hpp"

namespace crnd::testing {

inline ParameterSet make_params(u64 q, unsigned n, unsigned m, unsigned l, double bl, double bv,
                                double bp, ValidationMode mode = ValidationMode::relaxed) {
  ParameterSet p;
  p.modulus = q;
  p.secret_dim = n;
  p.image_dim = m;
  p.lossy_rank = l;
  p.bit_width = n * coord_bits(q);
  p.b_lossy = bl;
  p.b_verify = bv;
  p.b_preimage = bp;
  p.mode = mode;
  return p;
}

// rank over Z_q (q prime) by Gaussian elimination
inline std::size_t zq_rank(ZqMatrix m) {
  const u64 q = m.q;
  auto inv = [&](u64 a) {  // Fermat inverse
    u64 r = 1, b = a % q, e = q - 2;
    while (e) {
      if (e & 1) r = (static_cast<u128>(r) * b) % q;
      b = (static_cast<u128>(b) * b) % q;
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows && m.at(pivot, col) % q == 0) ++pivot;
    if (pivot == m.rows) continue;
    for (std::size_t c = 0; c < m.cols; ++c) std::swap(m.at(rank, c), m.at(pivot, c));
    u64 pi = inv(m.at(rank, col));
    for (std::size_t c = 0; c < m.cols; ++c) m.at(rank, c) = (static_cast<u128>(m.at(rank, c)) * pi) % q;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == rank || m.at(r, col) % q == 0) continue;
      u64 f = m.at(r, col) % q;
      for (std::size_t c = 0; c < m.cols; ++c)
        m.at(r, c) = (m.at(r, c) + static_cast<u128>(q - f) * m.at(rank, c)) % q;
    }
    ++rank;
  }
  return rank;
}

// one vector of the kernel of C (rows l x n, l < n), nonzero
inline ZqVector zq_kernel_vector(const ZqMatrix& c) {
  const u64 q = c.q;
  // reduce [C | I] and read a combination; simpler: solve by trying unit
  // completions of the echelon form
  ZqMatrix m = c;
  std::vector<std::size_t> pivot_col;
  auto inv = [&](u64 a) {
    u64 r = 1, b = a % q, e = q - 2;
    while (e) {
      if (e & 1) r = (static_cast<u128>(r) * b) % q;
      b = (static_cast<u128>(b) * b) % q;
      e >>= 1;
    }
    return r;
  };
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t piv = rank;
    while (piv < m.rows && m.at(piv, col) % q == 0) ++piv;
    if (piv == m.rows) continue;
    for (std::size_t cc = 0; cc < m.cols; ++cc) std::swap(m.at(rank, cc), m.at(piv, cc));
    u64 pi = inv(m.at(rank, col));
    for (std::size_t cc = 0; cc < m.cols; ++cc)
      m.at(rank, cc) = (static_cast<u128>(m.at(rank, cc)) * pi) % q;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == rank || m.at(r, col) % q == 0) continue;
      u64 f = m.at(r, col) % q;
      for (std::size_t cc = 0; cc < m.cols; ++cc)
        m.at(r, cc) = (m.at(r, cc) + static_cast<u128>(q - f) * m.at(rank, cc)) % q;
    }
    pivot_col.push_back(col);
    ++rank;
  }
  // pick the first free column, set it to 1, back-substitute the pivots
  ZqVector x(q, c.cols);
  std::size_t free_col = 0;
  while (free_col < c.cols) {
    bool is_pivot = false;
    for (std::size_t pc : pivot_col) is_pivot = is_pivot || pc == free_col;
    if (!is_pivot) break;
    ++free_col;
  }
  x[free_col] = 1;
  for (std::size_t r = 0; r < pivot_col.size(); ++r)
    x[pivot_col[r]] = (q - m.at(r, free_col) % q) % q;
  return x;
}

inline double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / 2.0;
}

}  // namespace crnd::testing
