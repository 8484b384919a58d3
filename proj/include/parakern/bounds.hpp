#ifndef PARAKERN_BOUNDS_HPP
#define PARAKERN_BOUNDS_HPP

#include "parakern/gaussian.hpp"
#include "parakern/parametrix.hpp"

// Closed-form majorants/minorants for the Neumann series and the
// fundamental solution: the inductive Phi_m bound, the psi-envelope, the
// series upper estimate, the polynomial-decay upper bound q, and the
// calibrated lower bound.

namespace parakern {

/// Parameters of the exponential-series envelope.  All fields are derived
/// from (gamma, K, delta); mu is the Gamma-argument step of the majorant
/// series, mu = (1-gamma)/2, and lambda = 1-gamma, so that
///   sum_m phi_m_majorant(m) = C5 |x|^{-gamma} tau^{-(3-gamma)/2} psi(z)
/// holds identically with c = c_base * tau^{(1-gamma)/2} and
/// z = 0.5 (1-delta) (x-y)^2 / ((1-gamma) tau).
struct EnvelopeParams {
  double gamma;
  double K;
  double delta;
  double B;        // polynomial decay exponent for q-type bounds
  double lambda;   // 1 - gamma
  double mu;       // (1 - gamma) / 2
  double c_base;   // sqrt(2pi) kappa1 K (1-delta)(1-gamma)(e delta)^{-1/2} Gamma((1-gamma)/2)
  double C3;
  double C4;       // c_base (they coincide; kept under the series name)
  double C5;
  double Lambda;   // |ln(1 - lambda)| = |ln gamma|

  EnvelopeParams(double gamma, double K, double delta, double B = 4.0);
  double c_of_tau(double tau) const;
  double z_of(double tau, double u) const;
};

/// Inductive majorant of |Phi_m|.
double phi_m_majorant(int m, const SpaceTimePair& pair, double gamma, double K,
                      double delta);

/// Closed-form bound on the convolution G1 * G2 of the Gaussian-weighted
/// power kernels G_i = tau^{alpha_i} |x|^{-beta or -gamma} exp(-u^2/(2tau)).
/// delta <= 0 selects the undamped variant; delta in (0,1) bounds the
/// damped convolution (exponents carrying the factor (1-delta)).
double G_convolution_bound(double alpha1, double alpha2, double beta,
                           double gamma, const SpaceTimePair& pair,
                           double delta = 0.0);

/// Envelope of the full series sum_m |Phi_m| at fixed delta.
double phi_envelope(const SpaceTimePair& pair, const DriftSpec& drift,
                    double delta);

/// Series upper estimate on p: Z + C3 sum_m C4^m ... ; may legitimately
/// overflow to +inf for large c (the bound is then vacuous but honest).
double upper_estimate_series(const SpaceTimePair& pair, const DriftSpec& drift,
                             double delta);

/// The tail of the same series from order start_m + 1: an analytic bound
/// on |sum_{m > start_m} Z*Phi_m| used for truncation certification.
double neumann_series_tail(int start_m, const SpaceTimePair& pair,
                           const DriftSpec& drift, double delta);

/// Empirical polynomial-decay constant: sup over a log grid of
/// psi(z)(1+z)^B on z >= e^e Lambda.
double c1_hat(const EnvelopeParams& env, double tau);

/// True when (x-y)^2 >= B Lambda e^e (t-s).
bool q_regime_holds(const SpaceTimePair& pair, double gamma, double B);

/// q(pair) = inf_delta q_delta: Z + C1_hat C5 tau^{-(3-gamma)/2} (1+z)^{-B},
/// minimized over delta by golden section.  Throws if the regime condition
/// fails.
double q_upper(const SpaceTimePair& pair, const DriftSpec& drift, double B);

/// Two-term minorant Z + C6 tau^{-(3-gamma)/2} (1+z)^{-B1} with the
/// calibrated constant C6 (may be negative).  Requires drift.K_minus > 0
/// and the regime condition.
double lower_estimate(const SpaceTimePair& pair, const DriftSpec& drift,
                      double delta, double B1, double C6);

}  // namespace parakern

#endif
