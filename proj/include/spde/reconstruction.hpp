#pragma once

#include <span>
#include <vector>

#include "spde/simulator.hpp"

namespace spde {

/// Coarse time grid t~_i = floor(N/n) i / N, i = 0..n.  Samples beyond t~_n
/// are unused; horizon() reports the effective end point.
struct TimeThinning {
  int N = 0;
  int n = 0;
  int stride = 0;  // floor(N/n)

  int node(int i) const { return stride * i; }
  double point(int i) const { return static_cast<double>(stride * i) / N; }
  double horizon() const { return point(n); }
};

/// Throws std::invalid_argument unless 1 <= n <= N.
TimeThinning build_time_thinning(int N, int n);

struct ApproxCoordinatePath {
  Mode mode;
  std::vector<double> values;  // at t~_0..t~_n
  double kappa_used = 0.0;
  double eta_used = 0.0;
};

/// Riemann-sum projection of the field onto e_{k,l} with drift ratios
/// replaced by estimates:
///   (2/M) sum_{j1=1..M1} sum_{j2=1..M2} X(t~_i, y, z) sin(pi k y) sin(pi l z) e^{kappa y/2} e^{eta z/2}
ApproxCoordinatePath approx_coordinate(const FieldSample& field, Mode mode, double kappa_hat,
                                       double eta_hat, const TimeThinning& tt);

struct VolatilityEstimate {
  Mode mode;
  double value = 0.0;  // realized quadratic variation
  int n_used = 0;
};

/// Sum of squared increments of a sampled path.
double realized_qv(std::span<const double> values);

VolatilityEstimate realized_qv(const ApproxCoordinatePath& path);

}  // namespace spde
