#pragma once

#include <vector>

#include "spde/model.hpp"
#include "spde/simulator.hpp"

namespace spde {

/// Interior sub-lattice used by the contrast stage.  Coarse points are
/// ybar_j = floor(M1/mbar1) j / M1; the kept points are those in [delta, 1-delta].
struct SpaceThinning {
  int M1 = 0, M2 = 0;
  int mbar1 = 0, mbar2 = 0;
  double delta = 0.0;
  int J1 = 0, J2 = 0;            // offsets: ybar_{J1} < delta <= ybar_{J1+1}
  int m1 = 0, m2 = 0;            // interior counts
  std::vector<int> nodes_y;      // full-grid indices j1 of the kept points
  std::vector<int> nodes_z;
  std::vector<double> points_y;  // ytilde_1..ytilde_m1
  std::vector<double> points_z;

  int m() const { return m1 * m2; }
};

/// Throws std::invalid_argument when preconditions fail or no coarse point
/// lies in [delta, 1-delta] on either axis.
SpaceThinning build_space_thinning(int M1, int M2, int mbar1, int mbar2, double delta);

/// Smallest mbar whose thinning of an M-point axis keeps exactly `target`
/// interior points; 0 when no mbar <= M achieves it.
int choose_mbar(int M, int target, double delta);

/// Z_N(y, z) = (1 / (N dt^alpha)) sum_i (X_{t_i} - X_{t_{i-1}})^2 on the
/// thinned points, m1 x m2 row-major.
struct SquaredIncrementField {
  int m1 = 0, m2 = 0;
  double alpha = 0.0;
  int N = 0;
  std::vector<double> values;

  double at(int a, int b) const { return values[static_cast<std::size_t>(a) * m2 + b]; }
};

SquaredIncrementField squared_increment_field(const FieldSample& field, const SpaceThinning& thin,
                                              double alpha);

/// Exact E[(Delta_i X)^2(y, z)] for xi = 0, summed over the modes of `trunc`:
///   sigma^2 sum (1 - e^{-lambda dt}) / w_{k,l} (1 - (1 - e^{-lambda dt})/2 e^{-2 lambda (i-1) dt}) e_{k,l}^2
/// with w = lambda^{1+alpha} for Q1 and lambda mu^alpha for Q2.
double expected_squared_increment_oracle(const ModelParams& params, NoiseKind kind, int i, int N,
                                         double y, double z, const TruncationSpec& trunc);

/// The oracle for every i = 1..N in one pass over the modes.
std::vector<double> expected_squared_increment_series(const ModelParams& params, NoiseKind kind,
                                                      int N, double y, double z,
                                                      const TruncationSpec& trunc);

/// Limit of E[Z_N(y, z)]: c(alpha) s e^{-kappa y - eta z} for Q1 and
/// c(alpha) S e^{-kappa y - eta z} for Q2.
double asymptotic_mean(const ModelParams& params, NoiseKind kind, double y, double z);

}  // namespace spde
