#include "crnd/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace crnd {

RateEstimate wilson_ci(std::size_t successes, std::size_t trials, double z) {
  RateEstimate est;
  est.successes = successes;
  est.trials = trials;
  if (trials == 0) return est;
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  est.rate = p;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  est.lo = std::max(0.0, center - half);
  est.hi = std::min(1.0, center + half);
  return est;
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: domain");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_pvalue(double stat, double dof) {
  if (stat <= 0) return 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) throw std::invalid_argument("chi_square_gof: nonpositive expectation");
    double d = observed[i] - expected[i];
    r.stat += d * d / expected[i];
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.pvalue = chi_square_pvalue(r.stat, r.dof);
  return r;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace crnd
