#pragma once

// Small Monte Carlo helpers shared by the statistical tests.

#include <cmath>
#include <cstddef>
#include <span>

namespace spde::testing {

struct Moments {
  double mean = 0.0;
  double var = 0.0;       // unbiased sample variance
  double mean_se = 0.0;   // standard error of the mean
  double var_se = 0.0;    // standard error of the sample variance
};

inline Moments moments(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  const double pop_var = m2 / n;
  return {mean, var, std::sqrt(var / n), std::sqrt((m4 - pop_var * pop_var) / n)};
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace spde::testing
