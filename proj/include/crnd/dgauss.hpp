#pragma once

#include <vector>

#include "crnd/rng.hpp"
#include "crnd/zq.hpp"

namespace crnd {

// Truncated discrete Gaussian on Z_q with parameter width: supported on
// {x : |centered(x)| <= width}, density proportional to exp(-pi c^2 / width^2).
// The support is enumerated once so sampling is exact inverse-CDF.
class DGaussTable {
public:
  DGaussTable(u64 q, double width);

  double density(u64 x) const;      // 0 outside support
  double log_density(u64 x) const;  // -inf outside support
  u64 sample(Rng& rng) const;

  u64 modulus() const { return q_; }
  double width() const { return width_; }
  i64 support_limit() const { return lim_; }  // support is centered values in [-lim, lim]
  std::size_t support_size() const { return cdf_.size(); }
  double pmf_at_centered(i64 c) const;

private:
  u64 q_;
  double width_;
  i64 lim_;
  double log_norm_;          // log of the normalizing sum
  std::vector<double> cdf_;  // over centered values -lim..lim
};

// i.i.d. coordinates from DGaussTable(q, width); every draw satisfies
// norm <= width*sqrt(m) because each coordinate is truncated at width.
ZqVector sample_dgauss_vector(const DGaussTable& table, std::size_t m, Rng& rng);

}  // namespace crnd
