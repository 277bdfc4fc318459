#pragma once

#include <cstddef>
#include <vector>

namespace crnd {

struct RateEstimate {
  double rate = 0;
  double lo = 0, hi = 0;  // Wilson 95% interval
  std::size_t successes = 0;
  std::size_t trials = 0;
};

RateEstimate wilson_ci(std::size_t successes, std::size_t trials, double z = 1.959964);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of a chi-square with dof degrees of freedom.
double chi_square_pvalue(double stat, double dof);

// Pearson statistic + p-value of observed counts against expected counts.
struct ChiSquareResult {
  double stat = 0;
  double dof = 0;
  double pvalue = 0;
};
ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected);

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);  // sample std

}  // namespace crnd
