#include <doctest.h>

#include <stdexcept>
#include <random>

#include "spde/contrast.hpp"

using namespace spde;

namespace {

SquaredIncrementField noiseless(const SpaceThinning& thin, double s, double kappa, double eta, double alpha) {
  SquaredIncrementField Z;
  Z.m1 = thin.m1;
  Z.m2 = thin.m2;
  Z.alpha = alpha;
  Z.N = 1000;
  for (int a = 0; a < thin.m1; ++a)
    for (int b = 0; b < thin.m2; ++b)
      Z.values.push_back(contrast_coefficient(alpha) * s *
                         std::exp(-(kappa * thin.points_y[a] + eta * thin.points_z[b])));
  return Z;
}

SquaredIncrementField random_field(const SpaceThinning& thin, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  SquaredIncrementField Z;
  Z.m1 = thin.m1;
  Z.m2 = thin.m2;
  Z.alpha = 0.5;
  for (int i = 0; i < thin.m(); ++i) Z.values.push_back(u(rng));
  return Z;
}

const SpaceThinning kThin = build_space_thinning(50, 50, 6, 6, 0.05);

}  // namespace

TEST_CASE("contrast vanishes at the generating triple and grows off it") {
  const auto Z = noiseless(kThin, 5.0, 1.0, 1.0, 0.5);
  CHECK(contrast_value(Z, kThin, 5.0, 1.0, 1.0, 0.5) == doctest::Approx(0.0).epsilon(1e-28));
  CHECK(contrast_value(Z, kThin, 5.0, 1.1, 1.0, 0.5) > 0.0);
  CHECK(contrast_value(Z, kThin, 5.0, 0.9, 1.0, 0.5) > 0.0);

  // at the lower scale bound the contrast is the direct residual sum
  const double smin = ContrastConfig{}.scale.lo;
  double direct = 0.0;
  for (int a = 0; a < kThin.m1; ++a)
    for (int b = 0; b < kThin.m2; ++b) {
      const double r = Z.at(a, b) - contrast_coefficient(0.5) * smin * std::exp(-(kThin.points_y[a] + kThin.points_z[b]));
      direct += r * r;
    }
  CHECK(contrast_value(Z, kThin, smin, 1.0, 1.0, 0.5) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> us(0.5, 10.0), uk(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto Z = random_field(kThin, rng);
    const double s = us(rng), k = uk(rng), e = uk(rng);
    const auto g = contrast_gradient(Z, kThin, s, k, e, 0.5);
    const double h = 1e-6;
    const double fd[3] = {
        (contrast_value(Z, kThin, s + h, k, e, 0.5) - contrast_value(Z, kThin, s - h, k, e, 0.5)) / (2 * h),
        (contrast_value(Z, kThin, s, k + h, e, 0.5) - contrast_value(Z, kThin, s, k - h, e, 0.5)) / (2 * h),
        (contrast_value(Z, kThin, s, k, e + h, 0.5) - contrast_value(Z, kThin, s, k, e - h, 0.5)) / (2 * h)};
    const double scale = std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g[i] - fd[i]) <= 1e-5 * scale);
  }
  const auto Z = noiseless(kThin, 5.0, 1.0, 1.0, 0.5);
  for (double v : contrast_gradient(Z, kThin, 5.0, 1.0, 1.0, 0.5)) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("gradient is linear in Z when the model term is switched off") {
  std::mt19937_64 rng(23);
  auto Z = random_field(kThin, rng);
  const auto g1 = contrast_gradient(Z, kThin, 0.0, 0.4, -0.3, 0.5);
  for (double& v : Z.values) v *= 3.0;
  const auto g3 = contrast_gradient(Z, kThin, 0.0, 0.4, -0.3, 0.5);
  for (int i = 0; i < 3; ++i) CHECK(g3[i] == doctest::Approx(3.0 * g1[i]).epsilon(1e-14));
}

TEST_CASE("profile scale") {
  const auto Z = noiseless(kThin, 5.0, 1.0, 1.0, 0.5);
  CHECK(profile_scale(Z, kThin, 1.0, 1.0, 0.5) == doctest::Approx(5.0).epsilon(1e-14));

  SquaredIncrementField zero = Z;
  std::fill(zero.values.begin(), zero.values.end(), 0.0);
  CHECK(profile_scale(zero, kThin, 0.0, 0.0, 0.5) == ContrastConfig{}.scale.lo);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uk(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto R = random_field(kThin, rng);
    const double k = uk(rng), e = uk(rng);
    const double best = contrast_value(R, kThin, profile_scale(R, kThin, k, e, 0.5), k, e, 0.5);
    for (int i = 0; i < 1000; ++i) {
      const double s = 1e-3 * std::pow(1e6, i / 999.0);  // log grid over the box
      CHECK(best <= contrast_value(R, kThin, s, k, e, 0.5) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("noiseless recovery to 1e-8") {
  const auto Z = noiseless(kThin, 5.0, 1.0, 1.0, 0.5);
  const MinimumContrastFit fit = minimize_contrast(Z, kThin, 0.5);
  CHECK(fit.converged);
  CHECK(std::abs(fit.scale - 5.0) <= 1e-8);
  CHECK(std::abs(fit.kappa_hat - 1.0) <= 1e-8);
  CHECK(std::abs(fit.eta_hat - 1.0) <= 1e-8);
  CHECK(fit.contrast <= 1e-20);
  CHECK(fit.n_restarts_used == 25);

  const auto Z2 = noiseless(kThin, 0.3, -2.5, 4.0, 0.3);
  const MinimumContrastFit fit2 = minimize_contrast(Z2, kThin, 0.3);
  CHECK(std::abs(fit2.scale - 0.3) <= 1e-8);
  CHECK(std::abs(fit2.kappa_hat + 2.5) <= 1e-8);
  CHECK(std::abs(fit2.eta_hat - 4.0) <= 1e-8);
}

TEST_CASE("restart reduction picks the smallest contrast") {
  std::mt19937_64 rng(31);
  const auto Z = random_field(kThin, rng);
  const ContrastConfig cfg;
  const MinimumContrastFit best = minimize_contrast(Z, kThin, 0.5, cfg);
  for (const auto& s : restart_points(cfg)) {
    const auto local = minimize_contrast_from(Z, kThin, 0.5, cfg, s[0], s[1]);
    CHECK(best.contrast <= local.contrast + 1e-12);
  }
  CHECK(best.kappa_hat >= cfg.kappa.lo);
  CHECK(best.kappa_hat <= cfg.kappa.hi);
  CHECK(best.scale >= cfg.scale.lo);
  CHECK(best.contrast >= 0.0);
}

TEST_CASE("Q1 and Q2 data go through the same functional") {
  std::mt19937_64 rng(37);
  const auto Z = random_field(kThin, rng);
  const auto a = minimize_contrast(Z, kThin, 0.5);
  const auto b = minimize_contrast(Z, kThin, 0.5);
  CHECK(a.scale == b.scale);
  CHECK(a.kappa_hat == b.kappa_hat);
  CHECK(a.eta_hat == b.eta_hat);
  CHECK(a.contrast == b.contrast);
}

TEST_CASE("a single interior point cannot identify the drift") {
  const SpaceThinning one = build_space_thinning(4, 4, 2, 2, 0.25);
  REQUIRE(one.m() == 1);
  SquaredIncrementField Z;
  Z.m1 = Z.m2 = 1;
  Z.alpha = 0.5;
  Z.values = {0.7};
  const auto fit = minimize_contrast(Z, one, 0.5);
  CHECK_FALSE(fit.converged);
  CHECK(fit.scale == profile_scale(Z, one, fit.kappa_hat, fit.eta_hat, 0.5));
}

TEST_CASE("config validation") {
  ContrastConfig c;
  c.kappa = {1.0, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.scale = {0.0, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.grid_eta = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
