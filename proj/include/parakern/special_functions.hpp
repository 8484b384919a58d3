#ifndef PARAKERN_SPECIAL_FUNCTIONS_HPP
#define PARAKERN_SPECIAL_FUNCTIONS_HPP

#include <vector>

// Gamma/Beta, the generalized Mittag-Leffler family E_{alpha,beta},
// its m>=1 slice g_mu, and the exponentially damped series
// psi_{lambda,c,mu}(z) = sum_{m>=1} c^m exp(-lambda^m z) / Gamma(m mu)
// together with an empirical check of its polynomial decay.

namespace parakern {

/// Gamma(x), x > 0.  Lanczos approximation, relative error below 1e-13.
double gamma_fn(double x);

/// log Gamma(x), x > 0.
double lgamma_fn(double x);

/// Euler Beta B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b), a,b > 0.
double beta_fn(double a, double b);

struct MLParams {
  double alpha;  // series exponent step, > 0
  double beta;   // series exponent offset, >= 0

  MLParams(double alpha_, double beta_);
};

/// E_{alpha,beta}(z) = sum_{k>=0} z^k / Gamma(alpha k + beta).
/// For beta = 0 the k = 0 term is dropped (1/Gamma(0) := 0).
double mittag_leffler(const MLParams& params, double z);

/// g_mu(z) = sum_{m>=1} z^m / Gamma(m mu) = E_{mu,0}(z) - 1 + 1 = E_{mu,0}(z)
/// under the 1/Gamma(0) = 0 convention used here.
double g_mu(double mu, double z);

struct PsiParams {
  double lambda;  // geometric decay rate of the exponents, in (0,1)
  double c;       // series base, > 0 (c = 0 allowed, gives the zero series)
  double mu;      // Gamma argument step, > 0
  double Lambda;  // |ln(1 - lambda)|, kept redundantly for bound formulas

  PsiParams(double lambda_, double c_, double mu_);
};

/// psi_{lambda,c,mu}(z), z >= 0.  Strictly positive for c > 0 and
/// non-increasing in z.
double psi(const PsiParams& params, double z);

/// The m >= 2 tail: psi(z) - c exp(-lambda z)/Gamma(mu).
double psi_tail2(const PsiParams& params, double z);

struct PsiDecayReport {
  double C1_hat;       // empirical sup of psi(z) (1+z)^B over the grid
  double trend_slope;  // least-squares slope of log(psi (1+z)^B) vs log z
  bool bounded;        // C1_hat finite and trend_slope <= slope tolerance
  std::vector<double> grid;
  std::vector<double> weighted;  // psi(z) (1+z)^B per grid point
};

/// Checks psi(z) <= C1 (1+z)^{-B} on a grid with z/Lambda >= e^e and
/// reports the empirical constant.  Throws if a grid point is below the
/// threshold.
PsiDecayReport verify_psi_decay(const PsiParams& params, double B,
                                const std::vector<double>& z_grid);

}  // namespace parakern

#endif
