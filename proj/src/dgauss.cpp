#include "crnd/dgauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crnd {

DGaussTable::DGaussTable(u64 q, double width) : q_(q), width_(width) {
  if (q < 2) throw std::invalid_argument("DGaussTable: modulus must be >= 2");
  if (!(width > 0)) throw std::invalid_argument("DGaussTable: width must be positive");
  lim_ = std::min<i64>(static_cast<i64>(std::floor(width)), static_cast<i64>((q - 1) / 2));
  if (lim_ < 0) lim_ = 0;

  std::vector<double> weights(static_cast<std::size_t>(2 * lim_ + 1));
  double total = 0;
  for (i64 c = -lim_; c <= lim_; ++c) {
    double wgt = std::exp(-M_PI * static_cast<double>(c) * c / (width * width));
    weights[static_cast<std::size_t>(c + lim_)] = wgt;
    total += wgt;
  }
  log_norm_ = std::log(total);
  cdf_.resize(weights.size());
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] / total;
    cdf_[i] = acc;
  }
  cdf_.back() = 1.0;
}

double DGaussTable::pmf_at_centered(i64 c) const {
  if (c < -lim_ || c > lim_) return 0;
  return std::exp(-M_PI * static_cast<double>(c) * c / (width_ * width_) - log_norm_);
}

double DGaussTable::density(u64 x) const { return pmf_at_centered(centered(x, q_)); }

double DGaussTable::log_density(u64 x) const {
  i64 c = centered(x, q_);
  if (c < -lim_ || c > lim_) return -std::numeric_limits<double>::infinity();
  return -M_PI * static_cast<double>(c) * c / (width_ * width_) - log_norm_;
}

u64 DGaussTable::sample(Rng& rng) const {
  double r = rng.real01();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), r);
  i64 c = static_cast<i64>(it - cdf_.begin()) - lim_;
  return c >= 0 ? static_cast<u64>(c) : q_ - static_cast<u64>(-c);
}

ZqVector sample_dgauss_vector(const DGaussTable& table, std::size_t m, Rng& rng) {
  ZqVector out(table.modulus(), m);
  for (std::size_t i = 0; i < m; ++i) out[i] = table.sample(rng);
  return out;
}

}  // namespace crnd
