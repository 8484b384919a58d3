#include "parakern/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "parakern/special_functions.hpp"

namespace parakern {

EnvelopeParams::EnvelopeParams(double gamma_, double K_, double delta_,
                               double B_)
    : gamma(gamma_), K(K_), delta(delta_), B(B_) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("EnvelopeParams: gamma must be in (0,1)");
  if (!(K >= 0.0)) throw std::domain_error("EnvelopeParams: K must be >= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("EnvelopeParams: delta must be in (0,1)");
  if (!(B > 0.0)) throw std::domain_error("EnvelopeParams: B must be > 0");
  lambda = 1.0 - gamma;
  mu = 0.5 * (1.0 - gamma);
  const double k1 = kappa1(gamma);
  c_base = std::sqrt(2.0 * M_PI) * k1 * K * (1.0 - delta) * (1.0 - gamma) /
           std::sqrt(M_E * delta) * gamma_fn(0.5 * (1.0 - gamma));
  C4 = c_base;
  C3 = gamma_fn(0.5 * (1.0 - gamma)) /
       (2.0 * M_PI * k1 * std::pow(1.0 - delta, 1.5) * (1.0 - gamma));
  C5 = 1.0 / (2.0 * M_PI * k1 * (1.0 - delta) * (1.0 - gamma));
  Lambda = std::fabs(std::log(1.0 - lambda));
}

double EnvelopeParams::c_of_tau(double tau) const {
  return c_base * std::pow(tau, 0.5 * (1.0 - gamma));
}

double EnvelopeParams::z_of(double tau, double u) const {
  return 0.5 * (1.0 - delta) * u * u / ((1.0 - gamma) * tau);
}

double phi_m_majorant(int m, const SpaceTimePair& pair, double gamma, double K,
                      double delta) {
  if (m < 1) throw std::domain_error("phi_m_majorant: m must be >= 1");
  if (pair.x == 0.0)
    throw std::domain_error("phi_m_majorant: singular point x = 0");
  if (!(gamma > 0.0 && gamma < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw std::domain_error("phi_m_majorant: parameters out of range");
  if (K == 0.0) return 0.0;
  const double tau = pair.tau(), u = pair.u();
  const double lg = 0.5 * (1.0 - gamma);
  const double lnM =
      (0.5 * m - 1.0) * std::log(2.0 * M_PI) +
      (m - 1.0) * std::log(kappa1(gamma)) + m * std::log(K) +
      (m - 1.0) * std::log((1.0 - delta) * (1.0 - gamma)) -
      0.5 * m * std::log(M_E * delta) - gamma * std::log(std::fabs(pair.x)) +
      (m * lg - 1.5 + 0.5 * gamma) * std::log(tau) + m * lgamma_fn(lg) -
      lgamma_fn(m * lg) -
      0.5 * (1.0 - delta) * std::pow(1.0 - gamma, m - 1) * u * u / tau;
  return std::exp(lnM);
}

double G_convolution_bound(double alpha1, double alpha2, double beta,
                           double gamma, const SpaceTimePair& pair,
                           double delta) {
  if (!(alpha1 > -1.0 && alpha2 > -1.0))
    throw std::domain_error("G_convolution_bound: alpha exponents must be > -1");
  if (!(beta >= 0.0 && beta < 1.0 && gamma >= 0.0 && gamma < 1.0))
    throw std::domain_error("G_convolution_bound: beta,gamma must be in [0,1)");
  if (!(0.5 * (3.0 - gamma) + alpha1 > 0.0 &&
        0.5 * (3.0 - gamma) + alpha2 > 0.0))
    throw std::domain_error("G_convolution_bound: Beta arguments not positive");
  if (pair.x == 0.0 && beta > 0.0)
    throw std::domain_error("G_convolution_bound: singular point x = 0");
  if (delta >= 1.0)
    throw std::domain_error("G_convolution_bound: delta must be < 1");
  const double k1 = (gamma > 0.0) ? kappa1(gamma) : std::sqrt(2.0 * M_PI);
  const double tau = pair.tau(), u = pair.u();
  const double damp = (delta > 0.0) ? (1.0 - delta) : 1.0;
  double v = k1 * std::pow(tau, 1.5 + alpha1 + alpha2 - 0.5 * gamma) *
             beta_fn(0.5 * (3.0 - gamma) + alpha1,
                     0.5 * (3.0 - gamma) + alpha2) *
             std::exp(-0.5 * damp * (1.0 - gamma) * u * u / tau);
  if (beta > 0.0) v *= std::pow(std::fabs(pair.x), -beta);
  if (delta > 0.0) v *= std::pow(1.0 - delta, 0.5 * (beta + gamma - 1.0));
  return v;
}

double phi_envelope(const SpaceTimePair& pair, const DriftSpec& drift,
                    double delta) {
  if (pair.x == 0.0)
    throw std::domain_error("phi_envelope: singular point x = 0");
  if (drift.K == 0.0) return 0.0;
  const EnvelopeParams env(drift.gamma, drift.K, delta);
  const double tau = pair.tau();
  const PsiParams pp(env.lambda, env.c_of_tau(tau), env.mu);
  return env.C5 * std::pow(std::fabs(pair.x), -drift.gamma) *
         std::pow(tau, -0.5 * (3.0 - drift.gamma)) *
         psi(pp, env.z_of(tau, pair.u()));
}

namespace {

// sum_{m > start_m} C4^m tau^{m(1-gamma)/2} / Gamma(0.5(m(1-gamma)+2-gamma))
//                 * exp{-0.5(1-delta)(1-gamma)^{m-1} u^2/tau}
double series_from(int m0, const EnvelopeParams& env, double tau, double u) {
  if (env.C4 == 0.0) return 0.0;
  const double base = std::log(env.C4) + 0.5 * (1.0 - env.gamma) * std::log(tau);
  const double zdamp = 0.5 * (1.0 - env.delta) * u * u / tau;
  double sum = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  for (int m = m0; m < 400000; ++m) {
    const double lg = 0.5 * (m * (1.0 - env.gamma) + 2.0 - env.gamma);
    const double e = std::exp(m * base - lgamma_fn(lg));
    const double term = e * std::exp(-zdamp * std::pow(env.lambda, m - 1));
    sum += term;
    if (std::isinf(sum)) return sum;  // bound is vacuous; report honestly
    if (m > m0 && e < prev_env) {
      const double ratio = e / prev_env;
      if (ratio < 0.5) {
        const double tail = e * ratio / (1.0 - ratio);
        if (tail < 1e-14 * sum && term < 1e-14 * sum) break;
      }
    }
    prev_env = e;
  }
  return sum;
}

}  // namespace

double upper_estimate_series(const SpaceTimePair& pair, const DriftSpec& drift,
                             double delta) {
  if (pair.x == 0.0)
    throw std::domain_error("upper_estimate_series: singular point x = 0");
  const double z0 = Z(pair);
  if (drift.K == 0.0) return z0;
  const EnvelopeParams env(drift.gamma, drift.K, delta);
  return z0 + env.C3 * series_from(1, env, pair.tau(), pair.u());
}

double neumann_series_tail(int start_m, const SpaceTimePair& pair,
                           const DriftSpec& drift, double delta) {
  if (start_m < 0)
    throw std::domain_error("neumann_series_tail: start_m must be >= 0");
  if (drift.K == 0.0) return 0.0;
  const EnvelopeParams env(drift.gamma, drift.K, delta);
  return env.C3 * series_from(start_m + 1, env, pair.tau(), pair.u());
}

double c1_hat(const EnvelopeParams& env, double tau) {
  const PsiParams pp(env.lambda, env.c_of_tau(tau), env.mu);
  const double z0 = std::exp(std::exp(1.0)) * env.Lambda;
  double best = 0.0;
  const int n = 60;
  for (int i = 0; i < n; ++i) {
    const double z = z0 * std::pow(1e3, double(i) / (n - 1));
    const double w = psi(pp, z) * std::pow(1.0 + z, env.B);
    if (w > best) best = w;
    if (std::isinf(best)) break;
  }
  return best;
}

bool q_regime_holds(const SpaceTimePair& pair, double gamma, double B) {
  const double Lambda = std::fabs(std::log(gamma));
  const double u = pair.u();
  return u * u >= B * Lambda * std::exp(std::exp(1.0)) * pair.tau();
}

namespace {

double q_delta_value(const SpaceTimePair& pair, const DriftSpec& drift,
                     double B, double delta) {
  const EnvelopeParams env(drift.gamma, drift.K, delta, B);
  const double tau = pair.tau();
  const double z = env.z_of(tau, pair.u());
  return Z(pair) + c1_hat(env, tau) * env.C5 *
                       std::pow(tau, -0.5 * (3.0 - drift.gamma)) *
                       std::pow(1.0 + z, -B);
}

}  // namespace

double q_upper(const SpaceTimePair& pair, const DriftSpec& drift, double B) {
  if (pair.x == 0.0) throw std::domain_error("q_upper: singular point x = 0");
  if (!(B > 0.0)) throw std::domain_error("q_upper: B must be > 0");
  if (!q_regime_holds(pair, drift.gamma, B))
    throw std::domain_error("q_upper: regime condition (x-y)^2 >= B Lambda e^e (t-s) violated");
  if (drift.K == 0.0) return Z(pair);
  // golden-section minimization over delta
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.01, b = 0.99;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = q_delta_value(pair, drift, B, c);
  double fd = q_delta_value(pair, drift, B, d);
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = q_delta_value(pair, drift, B, c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = q_delta_value(pair, drift, B, d);
    }
  }
  return std::min(fc, fd);
}

double lower_estimate(const SpaceTimePair& pair, const DriftSpec& drift,
                      double delta, double B1, double C6) {
  if (!(drift.K_minus > 0.0))
    throw std::domain_error("lower_estimate: drift.K_minus must be declared positive");
  if (!(B1 > 0.0)) throw std::domain_error("lower_estimate: B1 must be > 0");
  if (!q_regime_holds(pair, drift.gamma, B1))
    throw std::domain_error("lower_estimate: regime condition violated");
  const EnvelopeParams env(drift.gamma, drift.K, delta, B1);
  const double tau = pair.tau();
  const double z = env.z_of(tau, pair.u());
  return Z(pair) + C6 * std::pow(tau, -0.5 * (3.0 - drift.gamma)) *
                       std::pow(1.0 + z, -B1);
}

}  // namespace parakern
