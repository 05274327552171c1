#pragma once

#include <array>

#include "spde/increments.hpp"

namespace spde {

struct Interval {
  double lo;
  double hi;

  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

/// Search box and optimizer settings for the minimum-contrast fit.  The
/// scale axis is s for Q1 data and S for Q2 data.
struct ContrastConfig {
  Interval scale{1e-3, 1e3};
  Interval kappa{-20.0, 20.0};
  Interval eta{-20.0, 20.0};
  int grid_kappa = 5;
  int grid_eta = 5;
  int max_iter = 500;
  double grad_tol = 1e-10;
  double step_tol = 1e-12;

  /// Throws std::invalid_argument for degenerate intervals, a non-positive
  /// scale bound or non-positive counts.
  void validate() const;
};

struct MinimumContrastFit {
  double scale = 0.0;
  double kappa_hat = 0.0;
  double eta_hat = 0.0;
  double contrast = 0.0;
  bool converged = false;
  int n_restarts_used = 0;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// U(scale, kappa, eta) = sum_{a,b} (Z(a,b) - c(alpha) scale e^{-(kappa y_a + eta z_b)})^2
double contrast_value(const SquaredIncrementField& Z, const SpaceThinning& thin, double scale,
                      double kappa, double eta, double alpha);

/// Analytic gradient of contrast_value in (scale, kappa, eta).
std::array<double, 3> contrast_gradient(const SquaredIncrementField& Z, const SpaceThinning& thin,
                                        double scale, double kappa, double eta, double alpha);

/// Least-squares scale for fixed (kappa, eta), clamped to `box`.
double profile_scale(const SquaredIncrementField& Z, const SpaceThinning& thin, double kappa,
                     double eta, double alpha, Interval box = ContrastConfig{}.scale);

/// Multi-start projected BFGS over (kappa, eta) with the scale profiled out.
/// The fit is flagged not converged when the thinning has fewer than two
/// points on either axis (scale and drift are then confounded).
MinimumContrastFit minimize_contrast(const SquaredIncrementField& Z, const SpaceThinning& thin,
                                     double alpha, const ContrastConfig& config = {});

/// One local run of the optimizer from (kappa0, eta0); exposed so callers
/// can audit the restart reduction.
MinimumContrastFit minimize_contrast_from(const SquaredIncrementField& Z, const SpaceThinning& thin,
                                          double alpha, const ContrastConfig& config,
                                          double kappa0, double eta0);

/// Start points of the multi-start grid, in the order they are tried.
std::vector<std::array<double, 2>> restart_points(const ContrastConfig& config);

}  // namespace spde
