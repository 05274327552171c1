#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace spde {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kPi2 = kPi * kPi;

/// Which Q-Wiener process drives the equation.  The Q2 variants differ only in
/// whether the shift mu0 is treated as known when estimating.
enum class NoiseKind { Q1, Q2KnownMu0, Q2UnknownMu0 };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

inline bool is_q2(NoiseKind kind) { return kind != NoiseKind::Q1; }

/// Spectral index (k, l), both >= 1.
struct Mode {
  int k = 1;
  int l = 1;

  Mode() = default;
  Mode(int k_, int l_);

  friend bool operator==(const Mode&, const Mode&) = default;
  friend auto operator<=>(const Mode&, const Mode&) = default;
};

/// Coefficients of the parabolic operator plus the noise amplitude and
/// damping exponent.  Validated once at construction; every accessor below
/// assumes validity.
class ModelParams {
 public:
  /// Throws std::invalid_argument when theta2 <= 0, sigma < 0, alpha outside
  /// (0,1), mu0 <= -2 pi^2, or lambda_{1,1} <= 0.
  ModelParams(double theta0, double theta1, double eta1, double theta2,
              double sigma, double alpha,
              std::optional<double> mu0 = std::nullopt);

  double theta0() const { return theta0_; }
  double theta1() const { return theta1_; }
  double eta1() const { return eta1_; }
  double theta2() const { return theta2_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  const std::optional<double>& mu0() const { return mu0_; }

  /// theta1/theta2 and eta1/theta2.
  double kappa() const { return theta1_ / theta2_; }
  double eta() const { return eta1_ / theta2_; }

  /// Copy with a different noise amplitude (sigma = 0 is allowed for
  /// deterministic checks).
  ModelParams with_sigma(double sigma) const;
  ModelParams with_alpha(double alpha) const;
  ModelParams with_mu0(std::optional<double> mu0) const;

 private:
  double theta0_;
  double theta1_;
  double eta1_;
  double theta2_;
  double sigma_;
  double alpha_;
  std::optional<double> mu0_;
};

/// Parameter combinations identified by the increment statistic.
struct DerivedRatios {
  double kappa;  // theta1 / theta2
  double eta;    // eta1 / theta2
  double s;      // sigma^2 / theta2
  double S;      // sigma^2 / theta2^(1-alpha)
};

DerivedRatios derived_ratios(const ModelParams& p);

/// lambda_{k,l} = -theta0 + (theta1^2 + eta1^2)/(4 theta2) + pi^2 (k^2 + l^2) theta2
double eigenvalue(Mode mode, const ModelParams& p);

/// mu_{k,l} = pi^2 (k^2 + l^2) + mu0.  Throws std::invalid_argument for
/// mu0 <= -2 pi^2.
double mu_value(Mode mode, double mu0);

/// One-dimensional factor sqrt(2) sin(pi k x) exp(-r x / 2), exactly 0 at
/// x = 0 and x = 1.  The eigenfunction is the product of the y and z factors.
double eigen_factor(int k, double x, double ratio);

/// e_{k,l}(y,z) = 2 sin(pi k y) sin(pi l z) exp(-kappa y / 2) exp(-eta z / 2).
double eigenfunction(Mode mode, double y, double z, const ModelParams& p);

/// lambda^{-alpha/2} for Q1, mu^{-alpha/2} for the Q2 variants.
double damping_factor(NoiseKind kind, Mode mode, const ModelParams& p);

/// Gamma(1 - alpha) / (4 pi alpha), the constant in front of the limiting
/// mean of the normalized squared increments.
double contrast_coefficient(double alpha);

}  // namespace spde
