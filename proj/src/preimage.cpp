#include "crnd/preimage.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace crnd {

u128 norm_threshold_sq(double width, std::size_t dim) {
  long double bound = static_cast<long double>(width) * width * static_cast<long double>(dim);
  return static_cast<u128>(floorl(bound * (1.0L + 1e-12L) + 1e-9L));
}

bool preimage_member(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image,
                     int branch, const ZqVector& x, double width) {
  ZqVector r = sub(image, matvec(matrix, x));
  if (branch) r = sub(r, shift);
  return norm_sq(r) <= norm_threshold_sq(width, matrix.rows);
}

namespace {

u64 checked_domain(const ParameterSet& p, u64 enum_budget) {
  u64 total = p.domain_size();
  if (total > enum_budget) throw BudgetError("preimage scan: q^n exceeds the enumeration budget");
  if (p.modulus > (u64{1} << 28)) throw BudgetError("preimage scan: modulus too large for the scan kernel");
  return total;
}

void decode_index(u64 idx, u64 q, std::size_t n, std::vector<u64>& x) {
  for (std::size_t j = n; j-- > 0;) {
    x[j] = idx % q;
    idx /= q;
  }
}

// Scans flat indices [beg, end), appending hits in order. The residual vector
// is updated incrementally: an odometer step changes every carried coordinate
// by +1 mod q, so each changed coordinate subtracts its column once.
void scan_range(const ZqMatrix& m, const ZqVector& shift, const ZqVector& image, int branch,
                u64 threshold_hi /* as u64; thresholds fit at scan scale */, u64 beg, u64 end,
                std::vector<std::vector<u64>>* hits, u64* count) {
  const u64 q = m.q;
  const u64 half = (q - 1) / 2;
  const std::size_t rows = m.rows, n = m.cols;

  std::vector<u64> x(n);
  decode_index(beg, q, n, x);
  std::vector<u64> r(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    u128 acc = image[i] + static_cast<u128>(branch ? q - shift[i] % q : 0);
    const u64* row = m.row(i);
    for (std::size_t j = 0; j < n; ++j) acc += static_cast<u128>(q - row[j]) * x[j];
    r[i] = static_cast<u64>(acc % q);
  }

  for (u64 idx = beg; idx < end; ++idx) {
    u64 acc = 0;
    bool ok = true;
    for (std::size_t i = 0; i < rows; ++i) {
      u64 c = r[i] <= half ? r[i] : q - r[i];
      acc += c * c;
      if (acc > threshold_hi) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (hits) hits->push_back(x);
      if (count) ++*count;
    }
    if (idx + 1 == end) break;
    // odometer step: subtract the column of every coordinate that changes
    std::size_t j = n;
    for (;;) {
      --j;
      x[j] = x[j] + 1 == q ? 0 : x[j] + 1;
      for (std::size_t i = 0; i < rows; ++i) {
        u64 col = m.at(i, j);
        r[i] = r[i] >= col ? r[i] - col : r[i] + q - col;
      }
      if (x[j] != 0 || j == 0) break;
    }
  }
}

struct ChunkGrid {
  u64 total;
  u64 chunk;
  u64 count;
};

ChunkGrid make_grid(u64 total) {
  // fixed grid independent of thread count so outputs are deterministic
  u64 chunk = 4096;
  if (total / chunk > 4096) chunk = (total + 4095) / 4096;
  u64 count = (total + chunk - 1) / chunk;
  if (count == 0) count = 1;
  return {total, chunk, count};
}

}  // namespace

PreimageSet enumerate_preimages_serial(const ZqMatrix& matrix, const ZqVector& shift,
                                       const ZqVector& image, int branch, const ParameterSet& p,
                                       u64 enum_budget) {
  u64 total = checked_domain(p, enum_budget);
  PreimageSet set;
  set.branch = static_cast<std::uint8_t>(branch);
  std::vector<u64> x(matrix.cols);
  for (u64 idx = 0; idx < total; ++idx) {
    decode_index(idx, matrix.q, matrix.cols, x);
    ZqVector cand(matrix.q, x);
    if (preimage_member(matrix, shift, image, branch, cand, p.b_preimage)) set.elements.push_back(x);
  }
  return set;
}

PreimageSet enumerate_preimages(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image,
                                int branch, const ParameterSet& p, u64 enum_budget) {
  u64 total = checked_domain(p, enum_budget);
  u128 thr = norm_threshold_sq(p.b_preimage, matrix.rows);
  u64 thr64 = thr > static_cast<u128>(UINT64_MAX) ? UINT64_MAX : static_cast<u64>(thr);
  ChunkGrid grid = make_grid(total);

  std::vector<std::vector<std::vector<u64>>> parts(grid.count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long ci = 0; ci < static_cast<long long>(grid.count); ++ci) {
    u64 beg = static_cast<u64>(ci) * grid.chunk;
    u64 end = std::min(total, beg + grid.chunk);
    if (beg < end)
      scan_range(matrix, shift, image, branch, thr64, beg, end, &parts[static_cast<std::size_t>(ci)], nullptr);
  }

  PreimageSet set;
  set.branch = static_cast<std::uint8_t>(branch);
  std::size_t n = 0;
  for (const auto& part : parts) n += part.size();
  set.elements.reserve(n);
  for (auto& part : parts)
    for (auto& x : part) set.elements.push_back(std::move(x));
  return set;
}

u64 count_preimages(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image, int branch,
                    const ParameterSet& p, u64 enum_budget) {
  u64 total = checked_domain(p, enum_budget);
  u128 thr = norm_threshold_sq(p.b_preimage, matrix.rows);
  u64 thr64 = thr > static_cast<u128>(UINT64_MAX) ? UINT64_MAX : static_cast<u64>(thr);
  ChunkGrid grid = make_grid(total);

  u64 total_hits = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : total_hits)
#endif
  for (long long ci = 0; ci < static_cast<long long>(grid.count); ++ci) {
    u64 beg = static_cast<u64>(ci) * grid.chunk;
    u64 end = std::min(total, beg + grid.chunk);
    u64 cnt = 0;
    if (beg < end) scan_range(matrix, shift, image, branch, thr64, beg, end, nullptr, &cnt);
    total_hits += cnt;
  }
  return total_hits;
}

}  // namespace crnd
