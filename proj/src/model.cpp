#include "spde/model.hpp"

#include <stdexcept>

namespace spde {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Q1:
      return "Q1";
    case NoiseKind::Q2KnownMu0:
      return "Q2-known-mu0";
    case NoiseKind::Q2UnknownMu0:
      return "Q2-unknown-mu0";
  }
  return "?";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "Q1" || text == "q1") return NoiseKind::Q1;
  if (text == "Q2-known-mu0" || text == "q2-known") return NoiseKind::Q2KnownMu0;
  if (text == "Q2-unknown-mu0" || text == "q2-unknown") return NoiseKind::Q2UnknownMu0;
  throw std::invalid_argument("unknown noise kind '" + std::string(text) + "'");
}

Mode::Mode(int k_, int l_) : k(k_), l(l_) {
  if (k < 1 || l < 1) throw std::invalid_argument("mode indices must be >= 1");
}

ModelParams::ModelParams(double theta0, double theta1, double eta1, double theta2,
                         double sigma, double alpha, std::optional<double> mu0)
    : theta0_(theta0), theta1_(theta1), eta1_(eta1), theta2_(theta2),
      sigma_(sigma), alpha_(alpha), mu0_(mu0) {
  if (!std::isfinite(theta0) || !std::isfinite(theta1) || !std::isfinite(eta1))
    throw std::invalid_argument("drift coefficients must be finite");
  if (!(theta2 > 0.0) || !std::isfinite(theta2))
    throw std::invalid_argument("theta2 must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0,1)");
  if (mu0 && !(*mu0 > -2.0 * kPi2))
    throw std::invalid_argument("mu0 must exceed -2 pi^2");
  if (!(eigenvalue(Mode{}, *this) > 0.0))
    throw std::invalid_argument("lambda_{1,1} must be positive");
}

ModelParams ModelParams::with_sigma(double sigma) const {
  return {theta0_, theta1_, eta1_, theta2_, sigma, alpha_, mu0_};
}

ModelParams ModelParams::with_alpha(double alpha) const {
  return {theta0_, theta1_, eta1_, theta2_, sigma_, alpha, mu0_};
}

ModelParams ModelParams::with_mu0(std::optional<double> mu0) const {
  return {theta0_, theta1_, eta1_, theta2_, sigma_, alpha_, mu0};
}

DerivedRatios derived_ratios(const ModelParams& p) {
  const double sigma2 = p.sigma() * p.sigma();
  return {p.kappa(), p.eta(), sigma2 / p.theta2(),
          sigma2 / std::pow(p.theta2(), 1.0 - p.alpha())};
}

double eigenvalue(Mode mode, const ModelParams& p) {
  const double kk = static_cast<double>(mode.k) * mode.k;
  const double ll = static_cast<double>(mode.l) * mode.l;
  return -p.theta0() +
         (p.theta1() * p.theta1() + p.eta1() * p.eta1()) / (4.0 * p.theta2()) +
         kPi2 * (kk + ll) * p.theta2();
}

double mu_value(Mode mode, double mu0) {
  if (!(mu0 > -2.0 * kPi2)) throw std::invalid_argument("mu0 must exceed -2 pi^2");
  const double kk = static_cast<double>(mode.k) * mode.k;
  const double ll = static_cast<double>(mode.l) * mode.l;
  return kPi2 * (kk + ll) + mu0;
}

double eigen_factor(int k, double x, double ratio) {
  if (x == 0.0 || x == 1.0) return 0.0;
  return std::numbers::sqrt2 * std::sin(kPi * k * x) * std::exp(-0.5 * ratio * x);
}

double eigenfunction(Mode mode, double y, double z, const ModelParams& p) {
  if (y == 0.0 || y == 1.0 || z == 0.0 || z == 1.0) return 0.0;
  return 2.0 * std::sin(kPi * mode.k * y) * std::sin(kPi * mode.l * z) *
         std::exp(-0.5 * p.kappa() * y) * std::exp(-0.5 * p.eta() * z);
}

double damping_factor(NoiseKind kind, Mode mode, const ModelParams& p) {
  if (kind == NoiseKind::Q1) return std::pow(eigenvalue(mode, p), -0.5 * p.alpha());
  if (!p.mu0()) throw std::invalid_argument("Q2 noise requires mu0");
  return std::pow(mu_value(mode, *p.mu0()), -0.5 * p.alpha());
}

double contrast_coefficient(double alpha) {
  return std::tgamma(1.0 - alpha) / (4.0 * kPi * alpha);
}

}  // namespace spde
