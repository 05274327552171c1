#include "spde/increments.hpp"

#include <cmath>
#include <stdexcept>

#include "spde/summation.hpp"

namespace spde {

namespace {

struct AxisThinning {
  int J = 0;
  std::vector<int> nodes;
  std::vector<double> points;
};

AxisThinning thin_axis(int M, int mbar, double delta, const char* axis) {
  if (mbar < 1 || mbar > M)
    throw std::invalid_argument(std::string("coarse count on ") + axis + " must lie in [1, M]");
  const int step = M / mbar;
  auto coarse = [&](int j) { return static_cast<double>(step * j) / M; };

  AxisThinning out;
  int j = 0;
  while (j <= mbar && coarse(j) < delta) ++j;
  out.J = j - 1;
  for (; j <= mbar && coarse(j) <= 1.0 - delta; ++j) {
    out.nodes.push_back(step * j);
    out.points.push_back(coarse(j));
  }
  if (out.nodes.empty())
    throw std::invalid_argument(std::string("no coarse point in [delta, 1-delta] on ") + axis);
  return out;
}

}  // namespace

SpaceThinning build_space_thinning(int M1, int M2, int mbar1, int mbar2, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  AxisThinning ty = thin_axis(M1, mbar1, delta, "y");
  AxisThinning tz = thin_axis(M2, mbar2, delta, "z");
  SpaceThinning t;
  t.M1 = M1;
  t.M2 = M2;
  t.mbar1 = mbar1;
  t.mbar2 = mbar2;
  t.delta = delta;
  t.J1 = ty.J;
  t.J2 = tz.J;
  t.m1 = static_cast<int>(ty.nodes.size());
  t.m2 = static_cast<int>(tz.nodes.size());
  t.nodes_y = std::move(ty.nodes);
  t.nodes_z = std::move(tz.nodes);
  t.points_y = std::move(ty.points);
  t.points_z = std::move(tz.points);
  return t;
}

int choose_mbar(int M, int target, double delta) {
  for (int mbar = 1; mbar <= M; ++mbar) {
    try {
      if (static_cast<int>(thin_axis(M, mbar, delta, "axis").nodes.size()) == target) return mbar;
    } catch (const std::invalid_argument&) {
    }
  }
  return 0;
}

SquaredIncrementField squared_increment_field(const FieldSample& field, const SpaceThinning& thin,
                                              double alpha) {
  const SpaceTimeGrid& g = field.grid();
  if (thin.M1 != g.M1 || thin.M2 != g.M2)
    throw std::invalid_argument("thinning was built for a different spatial grid");

  SquaredIncrementField z;
  z.m1 = thin.m1;
  z.m2 = thin.m2;
  z.alpha = alpha;
  z.N = g.N;
  z.values.resize(static_cast<std::size_t>(thin.m1) * thin.m2);
  // N dt^alpha = N^{1-alpha}
  const double norm = std::pow(static_cast<double>(g.N), 1.0 - alpha);
  for (int a = 0; a < thin.m1; ++a) {
    for (int b = 0; b < thin.m2; ++b) {
      const int j1 = thin.nodes_y[a];
      const int j2 = thin.nodes_z[b];
      CompensatedSum acc;
      double prev = field.at(0, j1, j2);
      for (int i = 1; i <= g.N; ++i) {
        const double cur = field.at(i, j1, j2);
        const double d = cur - prev;
        acc += d * d;
        prev = cur;
      }
      z.values[static_cast<std::size_t>(a) * thin.m2 + b] = acc.value() / norm;
    }
  }
  return z;
}

namespace {

double mode_weight(const ModelParams& p, NoiseKind kind, Mode mode, double lambda) {
  if (kind == NoiseKind::Q1) return std::pow(lambda, 1.0 + p.alpha());
  return lambda * std::pow(mu_value(mode, *p.mu0()), p.alpha());
}

}  // namespace

std::vector<double> expected_squared_increment_series(const ModelParams& params, NoiseKind kind,
                                                      int N, double y, double z,
                                                      const TruncationSpec& trunc) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (is_q2(kind) && !params.mu0()) throw std::invalid_argument("Q2 noise requires mu0");
  const double dt = 1.0 / N;
  std::vector<CompensatedSum> sums(N);
  for (int k = 1; k <= trunc.K; ++k) {
    for (int l = 1; l <= trunc.L; ++l) {
      const Mode mode{k, l};
      const double e = eigenfunction(mode, y, z, params);
      if (e == 0.0) continue;
      const double lambda = eigenvalue(mode, params);
      const double one_minus = -std::expm1(-lambda * dt);
      const double lead = one_minus / mode_weight(params, kind, mode, lambda) * e * e;
      const double half = 0.5 * one_minus;
      const double ratio = std::exp(-2.0 * lambda * dt);
      double decay = 1.0;  // e^{-2 lambda (i-1) dt}
      for (int i = 1; i <= N; ++i) {
        sums[i - 1] += lead * (1.0 - half * decay);
        decay *= ratio;
      }
    }
  }
  const double sigma2 = params.sigma() * params.sigma();
  std::vector<double> out(N);
  for (int i = 0; i < N; ++i) out[i] = sigma2 * sums[i].value();
  return out;
}

double expected_squared_increment_oracle(const ModelParams& params, NoiseKind kind, int i, int N,
                                         double y, double z, const TruncationSpec& trunc) {
  if (i < 1 || i > N) throw std::invalid_argument("increment index must lie in [1, N]");
  if (is_q2(kind) && !params.mu0()) throw std::invalid_argument("Q2 noise requires mu0");
  const double dt = 1.0 / N;
  CompensatedSum sum;
  for (int k = 1; k <= trunc.K; ++k) {
    for (int l = 1; l <= trunc.L; ++l) {
      const Mode mode{k, l};
      const double e = eigenfunction(mode, y, z, params);
      if (e == 0.0) continue;
      const double lambda = eigenvalue(mode, params);
      const double one_minus = -std::expm1(-lambda * dt);
      const double bracket = 1.0 - 0.5 * one_minus * std::exp(-2.0 * lambda * (i - 1) * dt);
      sum += one_minus / mode_weight(params, kind, mode, lambda) * bracket * e * e;
    }
  }
  return params.sigma() * params.sigma() * sum.value();
}

double asymptotic_mean(const ModelParams& params, NoiseKind kind, double y, double z) {
  const DerivedRatios r = derived_ratios(params);
  const double scale = kind == NoiseKind::Q1 ? r.s : r.S;
  return contrast_coefficient(params.alpha()) * scale * std::exp(-r.kappa * y - r.eta * z);
}

}  // namespace spde
