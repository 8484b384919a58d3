#include "parakern/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "parakern/quadrature.hpp"
#include "parakern/special_functions.hpp"

namespace parakern {

SpaceTimePair::SpaceTimePair(double t_, double x_, double s_, double y_)
    : t(t_), x(x_), s(s_), y(y_) {
  if (!(t > s)) throw std::domain_error("SpaceTimePair: need t > s");
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::domain_error("SpaceTimePair: non-finite space point");
}

GaussTriple::GaussTriple(double s1, double s2, double s3)
    : sigma1(s1), sigma2(s2), sigma3(s3) {
  if (!(s1 > 0.0 && s2 > 0.0 && s3 > 0.0))
    throw std::domain_error("GaussTriple: widths must be positive");
  const double lhs = s3 * s3, rhs = s1 * s1 + s2 * s2;
  if (std::fabs(lhs - rhs) > 8.0 * 1e-16 * rhs)
    throw std::domain_error("GaussTriple: sigma3^2 != sigma1^2 + sigma2^2");
}

double Z(double tau, double u) {
  if (!(tau > 0.0)) throw std::domain_error("Z: need tau > 0");
  return std::exp(-0.5 * u * u / tau) / std::sqrt(2.0 * M_PI * tau);
}

double Z(const SpaceTimePair& pair) { return Z(pair.tau(), pair.u()); }

double dZ_dx(double tau, double u) { return -(u / tau) * Z(tau, u); }

double dZ_dx(const SpaceTimePair& pair) { return dZ_dx(pair.tau(), pair.u()); }

double dZ_dx_bound(const SpaceTimePair& pair, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("dZ_dx_bound: delta must be in (0,1)");
  const double tau = pair.tau(), u = pair.u();
  return std::exp(-0.5 * (1.0 - delta) * u * u / tau) /
         (std::sqrt(2.0 * M_PI * M_E * delta) * tau);
}

double gauss_convolution_closed_form(double x, double y,
                                     const GaussTriple& triple) {
  const double u = x - y;
  return std::sqrt(2.0 * M_PI) * triple.sigma1 * triple.sigma2 / triple.sigma3 *
         std::exp(-0.5 * u * u / (triple.sigma3 * triple.sigma3));
}

double kappa(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("kappa: gamma must be in (0,1)");
  const double q = gamma / (1.0 - gamma);
  return std::pow(q, 1.0 - gamma) + std::pow(q, -gamma);
}

double kappa1(double gamma) {
  return std::pow(2.0 * M_PI, 0.5 * (1.0 - gamma)) * kappa(gamma) *
         std::pow(2.0 / (1.0 - gamma), gamma);
}

namespace {

void check_j_args(double t, double r, double s, double gamma) {
  if (!(t > r && r > s))
    throw std::domain_error("J_integral: need t > r > s");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("J_integral: gamma must be in (0,1)");
}

}  // namespace

double J_integral(double x, double y, double t, double r, double s,
                  double gamma) {
  check_j_args(t, r, s, gamma);
  const double v1 = t - r, v2 = r - s;  // variances of the two factors
  const double sig1 = std::sqrt(v1), sig2 = std::sqrt(v2);
  SpaceRule rule;
  rule.gamma = gamma;
  double lo, hi, split;
  detail::convolution_extent(x, y, sig1, sig2, rule, lo, hi, split);
  const GaussianFeature feats[2] = {{x, sig1}, {y, sig2}};
  return integrate_space_singular(
      [&](double z) {
        const double dx = x - z, dy = z - y;
        return std::pow(std::fabs(z), -gamma) *
               std::exp(-0.5 * (dx * dx / v1 + dy * dy / v2));
      },
      gamma, rule, feats, lo, hi, split);
}

double J_integral_bound(double x, double y, double t, double r, double s,
                        double gamma) {
  check_j_args(t, r, s, gamma);
  const double v1 = t - r, v2 = r - s, v3 = t - s;
  const double u = x - y;
  // J <= kappa1(gamma) * (v1 v2 / v3)^{(1-gamma)/2} exp{-u^2/(2 v3)}
  return kappa1(gamma) * std::pow(v1 * v2 / v3, 0.5 * (1.0 - gamma)) *
         std::exp(-0.5 * u * u / v3);
}

double J_delta_integral(double x, double y, double t, double r, double s,
                        double gamma, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("J_delta_integral: delta must be in (0,1)");
  const double sc = std::sqrt(1.0 - delta);
  return std::pow(1.0 - delta, 0.5 * (gamma - 1.0)) *
         J_integral(x * sc, y * sc, t, r, s, gamma);
}

double J_delta_integral_bound(double x, double y, double t, double r, double s,
                              double gamma, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("J_delta_integral_bound: delta must be in (0,1)");
  check_j_args(t, r, s, gamma);
  const double v1 = t - r, v2 = r - s, v3 = t - s;
  const double u = x - y;
  return kappa1(gamma) * std::pow(1.0 - delta, 0.5 * (gamma - 1.0)) *
         std::pow(v1 * v2 / v3, 0.5 * (1.0 - gamma)) *
         std::exp(-0.5 * (1.0 - delta) * u * u / v3);
}

}  // namespace parakern
