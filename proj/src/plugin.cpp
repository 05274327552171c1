#include "spde/plugin.hpp"

#include <cmath>
#include <stdexcept>

namespace spde {

std::string_view to_string(PluginFailure f) {
  switch (f) {
    case PluginFailure::OrderingViolation:
      return "ordering-violation";
    case PluginFailure::NonpositiveBase:
      return "nonpositive-base";
    case PluginFailure::OutOfDomain:
      return "out-of-domain";
  }
  return "?";
}

namespace {

// x^p for x > 0 through exp/log; callers check the domain first.
double pos_pow(double x, double p) { return std::exp(p * std::log(x)); }

PluginEstimates failed(NoiseKind kind, PluginFailure f) {
  PluginEstimates e;
  e.kind = kind;
  e.failure = f;
  return e;
}

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

}  // namespace

PluginEstimates q1_plugin(double s_hat, double kappa_hat, double eta_hat, double sig11,
                          double sig12, double alpha) {
  check_alpha(alpha);
  constexpr NoiseKind kind = NoiseKind::Q1;
  if (!(s_hat > 0.0) || !(sig11 > 0.0) || !(sig12 > 0.0))
    return failed(kind, PluginFailure::NonpositiveBase);

  const double inv_a = 1.0 / alpha;
  const double base = pos_pow(sig12, -inv_a) - pos_pow(sig11, -inv_a);
  if (!std::isfinite(base)) return failed(kind, PluginFailure::OutOfDomain);
  if (!(base > 0.0)) return failed(kind, PluginFailure::OrderingViolation);

  const double inner = 3.0 * kPi2 / pos_pow(s_hat, inv_a) / base;
  const double theta2 = pos_pow(inner, alpha / (1.0 - alpha));
  const double sigma2 = s_hat * theta2;
  const double lambda11 = pos_pow(sigma2 / sig11, inv_a);
  const double theta0 =
      -lambda11 + ((kappa_hat * kappa_hat + eta_hat * eta_hat) / 4.0 + 2.0 * kPi2) * theta2;
  const double theta1 = kappa_hat * theta2;
  const double eta1 = eta_hat * theta2;
  if (!all_finite({theta2, sigma2, lambda11, theta0, theta1, eta1}) || !(theta2 > 0.0) ||
      !(sigma2 > 0.0))
    return failed(kind, PluginFailure::OutOfDomain);

  PluginEstimates e;
  e.kind = kind;
  e.theta0 = theta0;
  e.theta1 = theta1;
  e.eta1 = eta1;
  e.theta2 = theta2;
  e.sigma2 = sigma2;
  e.lambda11_hat = lambda11;
  return e;
}

PluginEstimates q2_known_plugin(double S_hat, double kappa_hat, double eta_hat, double qv11,
                                double mu0, double alpha) {
  check_alpha(alpha);
  constexpr NoiseKind kind = NoiseKind::Q2KnownMu0;
  if (!(mu0 > -2.0 * kPi2)) return failed(kind, PluginFailure::OutOfDomain);
  if (!(S_hat > 0.0) || !(qv11 > 0.0)) return failed(kind, PluginFailure::NonpositiveBase);

  const double sigma2 = pos_pow(mu_value(Mode{1, 1}, mu0), alpha) * qv11;
  const double theta2 = pos_pow(sigma2 / S_hat, 1.0 / (1.0 - alpha));
  const double theta1 = kappa_hat * theta2;
  const double eta1 = eta_hat * theta2;
  if (!all_finite({sigma2, theta2, theta1, eta1}) || !(theta2 > 0.0) || !(sigma2 > 0.0))
    return failed(kind, PluginFailure::OutOfDomain);

  PluginEstimates e;
  e.kind = kind;
  e.theta1 = theta1;
  e.eta1 = eta1;
  e.theta2 = theta2;
  e.sigma2 = sigma2;
  e.mu0 = mu0;
  return e;
}

PluginEstimates q2_unknown_plugin(double S_hat, double kappa_hat, double eta_hat, double tau11,
                                  double tau12, double alpha) {
  check_alpha(alpha);
  constexpr NoiseKind kind = NoiseKind::Q2UnknownMu0;
  if (!(S_hat > 0.0) || !(tau11 > 0.0) || !(tau12 > 0.0))
    return failed(kind, PluginFailure::NonpositiveBase);

  const double inv_a = 1.0 / alpha;
  const double p11 = pos_pow(tau11, -inv_a);
  const double base = pos_pow(tau12, -inv_a) - p11;
  if (!std::isfinite(base)) return failed(kind, PluginFailure::OutOfDomain);
  if (!(base > 0.0)) return failed(kind, PluginFailure::OrderingViolation);

  const double sigma2 = pos_pow(3.0 * kPi2 / base, alpha);
  const double mu11 = 3.0 * kPi2 * p11 / base;
  const double mu0 = mu11 - 2.0 * kPi2;
  if (!all_finite({sigma2, mu11}) || !(mu0 > -2.0 * kPi2))
    return failed(kind, PluginFailure::OutOfDomain);
  const double theta2 = pos_pow(sigma2 / S_hat, 1.0 / (1.0 - alpha));
  const double theta1 = kappa_hat * theta2;
  const double eta1 = eta_hat * theta2;
  if (!all_finite({theta2, theta1, eta1}) || !(theta2 > 0.0))
    return failed(kind, PluginFailure::OutOfDomain);

  PluginEstimates e;
  e.kind = kind;
  e.theta1 = theta1;
  e.eta1 = eta1;
  e.theta2 = theta2;
  e.sigma2 = sigma2;
  e.mu0 = mu0;
  return e;
}

namespace {

// [[a, b v^T], [b v, c v v^T]] scaled by `pref`
Eigen::MatrixXd bordered(double pref, double a, double b, double c, const Eigen::Vector4d& v) {
  Eigen::MatrixXd m(5, 5);
  m(0, 0) = a;
  m.block<1, 4>(0, 1) = b * v.transpose();
  m.block<4, 1>(1, 0) = b * v;
  m.block<4, 4>(1, 1) = c * v * v.transpose();
  return pref * m;
}

}  // namespace

CovarianceMatrix covariance_J(const ModelParams& p) {
  const double a = p.alpha();
  const double l11 = eigenvalue(Mode{1, 1}, p);
  const double l12 = eigenvalue(Mode{1, 2}, p);
  const double t0 = p.theta0() / (1.0 - a);
  const double u = l12 / a - t0;
  const double w = l11 / a - t0;
  const double c1 = l11 * l11 * u * u + l12 * l12 * w * w;
  const double c2 = -1.0 / (1.0 - a) * (l11 * l11 * u + l12 * l12 * w);
  const double c3 = (l11 * l11 + l12 * l12) / ((1.0 - a) * (1.0 - a));
  const Eigen::Vector4d v(p.theta1(), p.eta1(), p.theta2(), p.sigma() * p.sigma());
  const double pref = 2.0 / (9.0 * kPi2 * kPi2 * p.theta2() * p.theta2());
  return {CovarianceKind::J, bordered(pref, c1, c2, c3, v), {c1, c2, c3}};
}

namespace {

Eigen::Vector4d nu_vector(const ModelParams& p) {
  return {p.theta1(), p.eta1(), p.theta2(), (1.0 - p.alpha()) * p.sigma() * p.sigma()};
}

}  // namespace

CovarianceMatrix covariance_K(const ModelParams& p) {
  const double a = p.alpha();
  const Eigen::Vector4d nu = nu_vector(p);
  Eigen::MatrixXd k = 2.0 / ((1.0 - a) * (1.0 - a)) * nu * nu.transpose();
  return {CovarianceKind::K, std::move(k), {0.0, 0.0, 0.0}};
}

CovarianceMatrix covariance_L(const ModelParams& p) {
  if (!p.mu0()) throw std::invalid_argument("covariance L requires mu0");
  const double a = p.alpha();
  const double m11 = mu_value(Mode{1, 1}, *p.mu0());
  const double m12 = mu_value(Mode{1, 2}, *p.mu0());
  const double d1 = 2.0 * m11 * m11 * m12 * m12 / (a * a);
  const double d2 = m11 * m12 * (m11 + m12) / (a * (1.0 - a));
  const double d3 = (m11 * m11 + m12 * m12) / ((1.0 - a) * (1.0 - a));
  const double pref = 2.0 / (9.0 * kPi2 * kPi2);
  return {CovarianceKind::L, bordered(pref, d1, d2, d3, nu_vector(p)), {d1, d2, d3}};
}

std::optional<ModelParams> params_from_estimates(const PluginEstimates& est, double alpha) {
  if (!est.ok() || !est.theta1 || !est.eta1 || !est.theta2 || !est.sigma2) return std::nullopt;
  try {
    return ModelParams(est.theta0.value_or(0.0), *est.theta1, *est.eta1, *est.theta2,
                       std::sqrt(*est.sigma2), alpha, est.mu0);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace spde
