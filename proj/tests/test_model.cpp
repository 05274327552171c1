#include <doctest.h>

#include <stdexcept>
#include <random>

#include "spde/model.hpp"

using namespace spde;

namespace {

const ModelParams kPaper(0.0, 0.2, 0.2, 0.2, 1.0, 0.5);

ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> drift(-2.0, 2.0), diff(0.05, 3.0), alpha(0.05, 0.95);
  for (;;) {
    const double t1 = drift(rng), e1 = drift(rng), t2 = diff(rng);
    const double t0 = drift(rng);
    try {
      return ModelParams(t0, t1, e1, t2, diff(rng), alpha(rng), 0.0);
    } catch (const std::invalid_argument&) {
    }
  }
}

}  // namespace

TEST_CASE("eigenvalue at the simulation parameters") {
  // frozen from tests/oracles/frozen_values.py
  CHECK(eigenvalue(Mode{1, 1}, kPaper) == doctest::Approx(4.04784176043574).epsilon(1e-13));
  CHECK(std::round(eigenvalue(Mode{1, 1}, kPaper) * 100.0) / 100.0 == doctest::Approx(4.05));
  CHECK(eigenvalue(Mode{1, 2}, kPaper) == doctest::Approx(9.96960440108936).epsilon(1e-13));
}

TEST_CASE("eigenvalue of the drift-free unit operator is 2 pi^2") {
  const ModelParams p(0.0, 0.0, 0.0, 1.0, 1.0, 0.5);
  CHECK(eigenvalue(Mode{1, 1}, p) == doctest::Approx(2.0 * kPi2).epsilon(1e-15));
}

TEST_CASE("eigenvalue gap between (1,2) and (1,1) is 3 pi^2 theta2, and monotone") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const ModelParams p = random_params(rng);
    const double gap = eigenvalue(Mode{1, 2}, p) - eigenvalue(Mode{1, 1}, p);
    CHECK(gap == doctest::Approx(3.0 * kPi2 * p.theta2()).epsilon(1e-12));
    for (int k = 1; k <= 6; ++k)
      for (int l = 1; l <= 6; ++l) {
        CHECK(eigenvalue(Mode{k + 1, l}, p) > eigenvalue(Mode{k, l}, p));
        CHECK(eigenvalue(Mode{k, l + 1}, p) > eigenvalue(Mode{k, l}, p));
      }
  }
}

TEST_CASE("mu values") {
  CHECK(mu_value(Mode{1, 1}, 0.0) == doctest::Approx(2.0 * kPi2));
  for (double mu0 : {-15.0, 0.0, 3.5, 100.0})
    CHECK(mu_value(Mode{1, 2}, mu0) == doctest::Approx(mu_value(Mode{1, 1}, mu0) + 3.0 * kPi2));
  CHECK(mu_value(Mode{1, 1}, -2.0 * kPi2 + 0.1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(mu_value(Mode{1, 1}, -2.0 * kPi2), std::invalid_argument);
  CHECK_THROWS_AS(mu_value(Mode{1, 1}, -25.0), std::invalid_argument);
}

TEST_CASE("eigenfunction values and exact boundary zeros") {
  const ModelParams flat(0.0, 0.0, 0.0, 1.0, 1.0, 0.5);
  CHECK(eigenfunction(Mode{1, 1}, 0.5, 0.5, flat) == 2.0);
  const ModelParams unit_ratio(0.0, 0.7, 0.7, 0.7, 1.0, 0.5);
  CHECK(eigenfunction(Mode{1, 1}, 0.5, 0.5, unit_ratio) ==
        doctest::Approx(1.21306131942527).epsilon(1e-14));

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> idx(1, 500);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const ModelParams p = random_params(rng);
    const Mode m{idx(rng), idx(rng)};
    const double free = u(rng);
    CHECK(eigenfunction(m, 0.0, free, p) == 0.0);
    CHECK(eigenfunction(m, 1.0, free, p) == 0.0);
    CHECK(eigenfunction(m, free, 0.0, p) == 0.0);
    CHECK(eigenfunction(m, free, 1.0, p) == 0.0);
  }
}

TEST_CASE("damping factors") {
  const ModelParams p = kPaper.with_mu0(0.0);
  CHECK(std::pow(4.0478, -0.25) == doctest::Approx(0.705009937226484).epsilon(1e-14));
  CHECK(damping_factor(NoiseKind::Q1, Mode{1, 1}, p) ==
        doctest::Approx(std::pow(eigenvalue(Mode{1, 1}, p), -0.25)).epsilon(1e-15));
  CHECK(damping_factor(NoiseKind::Q2KnownMu0, Mode{1, 1}, p) ==
        doctest::Approx(0.474424998328794).epsilon(1e-14));
  // lambda_{1,1} = 1 gives a unit factor for any alpha
  const double theta0 = eigenvalue(Mode{1, 1}, kPaper) - 1.0;
  const ModelParams unit(theta0, 0.2, 0.2, 0.2, 1.0, 0.37);
  CHECK(damping_factor(NoiseKind::Q1, Mode{1, 1}, unit) == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 1; k < 8; ++k) {
    CHECK(damping_factor(NoiseKind::Q1, Mode{k + 1, 2}, p) < damping_factor(NoiseKind::Q1, Mode{k, 2}, p));
    CHECK(damping_factor(NoiseKind::Q2UnknownMu0, Mode{2, k + 1}, p) <
          damping_factor(NoiseKind::Q2UnknownMu0, Mode{2, k}, p));
  }
  CHECK_THROWS_AS(damping_factor(NoiseKind::Q2KnownMu0, Mode{1, 1}, kPaper), std::invalid_argument);
}

TEST_CASE("discrete weighted orthonormality on a 400 x 400 grid") {
  const ModelParams p(0.0, 0.3, -0.5, 0.4, 1.0, 0.5);
  const int M = 400;
  const double kappa = p.kappa(), eta = p.eta();
  for (int k = 1; k <= 4; ++k)
    for (int l = 1; l <= 4; ++l)
      for (int k2 = 1; k2 <= 4; ++k2)
        for (int l2 = 1; l2 <= 4; ++l2) {
          double sum = 0.0;
          for (int a = 1; a < M; ++a)
            for (int b = 1; b < M; ++b) {
              const double y = double(a) / M, z = double(b) / M;
              sum += eigenfunction(Mode{k, l}, y, z, p) * eigenfunction(Mode{k2, l2}, y, z, p) *
                     std::exp(kappa * y + eta * z);
            }
          sum /= double(M) * M;
          const double expected = (k == k2 && l == l2) ? 1.0 : 0.0;
          CHECK(std::abs(sum - expected) <= 2e-2);
        }
}

TEST_CASE("derived ratios round trip") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = random_params(rng);
    const DerivedRatios r = derived_ratios(p);
    CHECK(r.s > 0.0);
    CHECK(r.S > 0.0);
    const double t2 = p.theta2();
    const ModelParams back(p.theta0(), r.kappa * t2, r.eta * t2, t2, std::sqrt(r.s * t2), p.alpha());
    const DerivedRatios r2 = derived_ratios(back);
    CHECK(r2.kappa == doctest::Approx(r.kappa).epsilon(1e-15));
    CHECK(r2.eta == doctest::Approx(r.eta).epsilon(1e-15));
    CHECK(r2.s == doctest::Approx(r.s).epsilon(1e-15));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams(0, 0, 0, 0.0, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0, 0, 0, 1.0, -1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0, 0, 0, 1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0, 0, 0, 1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(0, 0, 0, 1.0, 1, 0.5, -2.0 * kPi2), std::invalid_argument);
  // lambda_{1,1} = 2 pi^2 - theta0 must stay positive
  CHECK_THROWS_AS(ModelParams(2.0 * kPi2 + 0.1, 0, 0, 1.0, 1, 0.5), std::invalid_argument);
  CHECK_NOTHROW(ModelParams(2.0 * kPi2 - 0.1, 0, 0, 1.0, 1, 0.5));
  CHECK_THROWS_AS(Mode(0, 1), std::invalid_argument);
  CHECK(parse_noise_kind(to_string(NoiseKind::Q2UnknownMu0)) == NoiseKind::Q2UnknownMu0);
  CHECK_THROWS_AS(parse_noise_kind("Q3"), std::invalid_argument);
}

TEST_CASE("contrast coefficient") {
  // Gamma(1/2) / (2 pi) = 1 / (2 sqrt(pi))
  CHECK(contrast_coefficient(0.5) == doctest::Approx(0.282094791773878).epsilon(1e-14));
  CHECK(contrast_coefficient(0.5) == doctest::Approx(0.5 / std::sqrt(kPi)).epsilon(1e-15));
}
