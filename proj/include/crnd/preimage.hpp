#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crnd/params.hpp"
#include "crnd/zq.hpp"

namespace crnd {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer threshold such that norm(v) <= width*sqrt(dim) iff norm_sq(v) <= threshold.
u128 norm_threshold_sq(double width, std::size_t dim);

// Membership predicate: norm(image - matrix*x - branch*shift) <= width*sqrt(m).
// This is the reference definition; the scans below must agree with it exactly.
bool preimage_member(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image,
                     int branch, const ZqVector& x, double width);

struct PreimageSet {
  std::uint8_t branch = 0;
  std::vector<std::vector<u64>> elements;  // ascending base-q odometer order

  std::size_t size() const { return elements.size(); }
};

// Serial reference scan: evaluates the membership predicate on every candidate.
PreimageSet enumerate_preimages_serial(const ZqMatrix& matrix, const ZqVector& shift,
                                       const ZqVector& image, int branch, const ParameterSet& p,
                                       u64 enum_budget);

// Production scan: incremental odometer residual updates, OpenMP across fixed
// chunks. Output is identical to the serial reference (same order).
PreimageSet enumerate_preimages(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image,
                                int branch, const ParameterSet& p, u64 enum_budget);

// Count-only version of the parallel scan (used when the elements themselves
// are not needed).
u64 count_preimages(const ZqMatrix& matrix, const ZqVector& shift, const ZqVector& image, int branch,
                    const ParameterSet& p, u64 enum_budget);

}  // namespace crnd
