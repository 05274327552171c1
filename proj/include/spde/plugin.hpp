#pragma once

#include <array>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "spde/model.hpp"

namespace spde {

enum class PluginFailure { OrderingViolation, NonpositiveBase, OutOfDomain };

std::string_view to_string(PluginFailure f);

/// Closed-form coefficient estimates.  Either `failure` is set and every
/// numeric field is empty, or all fields relevant to `kind` are filled.
struct PluginEstimates {
  NoiseKind kind = NoiseKind::Q1;
  std::optional<double> theta0;  // Q1 only
  std::optional<double> theta1;
  std::optional<double> eta1;
  std::optional<double> theta2;
  std::optional<double> sigma2;
  std::optional<double> mu0;          // Q2 (echoed when known, estimated otherwise)
  std::optional<double> lambda11_hat;  // Q1 only
  std::optional<PluginFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Q1 chain from (s, kappa, eta) and the realized variations of modes (1,1)
/// and (1,2).  Fails with OrderingViolation when sig12^{-1/alpha} <= sig11^{-1/alpha}.
PluginEstimates q1_plugin(double s_hat, double kappa_hat, double eta_hat, double sig11,
                          double sig12, double alpha);

/// Q2 chain with mu0 known: sigma^2 = mu_{1,1}^alpha qv11, theta2 = (sigma^2/S)^{1/(1-alpha)}.
PluginEstimates q2_known_plugin(double S_hat, double kappa_hat, double eta_hat, double qv11,
                                double mu0, double alpha);

/// Q2 chain with mu0 unknown, from the realized variations of modes (1,1) and (1,2).
PluginEstimates q2_unknown_plugin(double S_hat, double kappa_hat, double eta_hat, double tau11,
                                  double tau12, double alpha);

enum class CovarianceKind { J, K, L };

struct CovarianceMatrix {
  CovarianceKind which = CovarianceKind::J;
  Eigen::MatrixXd entries;
  std::array<double, 3> constants{};  // (c1, c2, c3), (d1, d2, d3), unused for K
};

/// Asymptotic covariance of sqrt(n) (theta0, theta1, eta1, theta2, sigma^2) for Q1.
CovarianceMatrix covariance_J(const ModelParams& params);
/// Asymptotic covariance of sqrt(n) (theta1, eta1, theta2, sigma^2) for Q2 with mu0 known.
CovarianceMatrix covariance_K(const ModelParams& params);
/// Asymptotic covariance of sqrt(n) (mu0, theta1, eta1, theta2, sigma^2) for Q2 with mu0 unknown.
CovarianceMatrix covariance_L(const ModelParams& params);

/// Model parameters implied by successful estimates, for evaluating the
/// covariances at the estimate.  Empty when the estimates failed or do not
/// form a valid parameter set.
std::optional<ModelParams> params_from_estimates(const PluginEstimates& est, double alpha);

}  // namespace spde
