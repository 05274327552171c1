#include "spde/reconstruction.hpp"

#include <cmath>
#include <stdexcept>

#include "spde/summation.hpp"

namespace spde {

TimeThinning build_time_thinning(int N, int n) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (n < 1 || n > N) throw std::invalid_argument("time thinning requires 1 <= n <= N");
  return {N, n, N / n};
}

ApproxCoordinatePath approx_coordinate(const FieldSample& field, Mode mode, double kappa_hat,
                                       double eta_hat, const TimeThinning& tt) {
  const SpaceTimeGrid& g = field.grid();
  if (tt.N != g.N) throw std::invalid_argument("time thinning does not lie on the field's grid");

  std::vector<double> wy(g.M1 + 1, 0.0), wz(g.M2 + 1, 0.0);
  for (int j = 1; j <= g.M1; ++j) {
    const double y = g.y(j);
    wy[j] = std::sin(kPi * mode.k * y) * std::exp(0.5 * kappa_hat * y);
  }
  for (int j = 1; j <= g.M2; ++j) {
    const double z = g.z(j);
    wz[j] = std::sin(kPi * mode.l * z) * std::exp(0.5 * eta_hat * z);
  }
  const double weight = 2.0 / (static_cast<double>(g.M1) * g.M2);

  ApproxCoordinatePath out;
  out.mode = mode;
  out.kappa_used = kappa_hat;
  out.eta_used = eta_hat;
  out.values.resize(tt.n + 1);
  for (int i = 0; i <= tt.n; ++i) {
    const auto slice = field.slice(tt.node(i));
    double total = 0.0;
    for (int j1 = 1; j1 <= g.M1; ++j1) {
      const double* row = slice.data() + static_cast<std::size_t>(j1) * (g.M2 + 1);
      double inner = 0.0;
      for (int j2 = 1; j2 <= g.M2; ++j2) inner += row[j2] * wz[j2];
      total += wy[j1] * inner;
    }
    out.values[i] = weight * total;
  }
  return out;
}

double realized_qv(std::span<const double> values) {
  CompensatedSum sum;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    sum += d * d;
  }
  return sum.value();
}

VolatilityEstimate realized_qv(const ApproxCoordinatePath& path) {
  if (path.values.size() < 2) throw std::invalid_argument("path needs at least two samples");
  return {path.mode, realized_qv(std::span<const double>(path.values)),
          static_cast<int>(path.values.size()) - 1};
}

}  // namespace spde
