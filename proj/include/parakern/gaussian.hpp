#ifndef PARAKERN_GAUSSIAN_HPP
#define PARAKERN_GAUSSIAN_HPP

// Gaussian parametrix Z, its space derivative and pointwise bound, the
// Gaussian convolution identity, and the singular parametric integrals
// J and J_delta with the closed-form constants kappa, kappa1.

namespace parakern {

struct SpaceTimePair {
  double t;
  double x;
  double s;
  double y;

  SpaceTimePair(double t_, double x_, double s_, double y_);
  double tau() const { return t - s; }
  double u() const { return x - y; }
};

struct GaussTriple {
  double sigma1;
  double sigma2;
  double sigma3;  // must satisfy sigma3^2 = sigma1^2 + sigma2^2

  GaussTriple(double s1, double s2, double s3);
};

/// Heat kernel Z(t,x,s,y) = (2 pi (t-s))^{-1/2} exp{-(x-y)^2 / (2(t-s))}.
double Z(const SpaceTimePair& pair);
double Z(double tau, double u);

/// d/dx Z = -((x-y)/(t-s)) Z.
double dZ_dx(const SpaceTimePair& pair);
double dZ_dx(double tau, double u);

/// |dZ/dx| <= (2 pi e delta)^{-1/2} (t-s)^{-1} exp{-(1-delta)(x-y)^2/(2(t-s))}.
double dZ_dx_bound(const SpaceTimePair& pair, double delta);

/// int exp{-0.5((x-z)^2/s1^2 + (z-y)^2/s2^2)} dz
///   = sqrt(2 pi) s1 s2 / s3 * exp{-0.5 (x-y)^2 / s3^2}.
double gauss_convolution_closed_form(double x, double y, const GaussTriple& triple);

/// kappa(gamma) = (g/(1-g))^{1-g} + (g/(1-g))^{-g}; the constant in
/// min_{D>0}(A D^{1-g} + B D^{-g}) = kappa(g) A^g B^{1-g}.
double kappa(double gamma);

/// kappa1(gamma) = (2 pi)^{(1-g)/2} kappa(g) (2/(1-g))^g.
double kappa1(double gamma);

/// J = int |z|^{-gamma} exp{-0.5((x-z)^2/(t-r) + (z-y)^2/(r-s))} dz,
/// evaluated with the singularity-adapted space rule.
double J_integral(double x, double y, double t, double r, double s, double gamma);

/// Closed-form upper bound on J (the kappa1 estimate).
double J_integral_bound(double x, double y, double t, double r, double s, double gamma);

/// J_delta, computed through the scaling relation
/// J_delta(x,t,y,s) = (1-delta)^{(gamma-1)/2} J(x sqrt(1-delta), t, y sqrt(1-delta), s).
double J_delta_integral(double x, double y, double t, double r, double s,
                        double gamma, double delta);

/// Closed-form upper bound on J_delta (kappa1 estimate with (1-delta) damping).
double J_delta_integral_bound(double x, double y, double t, double r, double s,
                              double gamma, double delta);

}  // namespace parakern

#endif
