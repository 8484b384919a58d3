#include "parakern/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace parakern {

namespace {

// Lanczos coefficients, g = 7, n = 9 (Godfrey's set).
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double x) {
  // x >= 0.5 assumed; series in 1/(x+k)
  double s = kLanczos[0];
  for (int k = 1; k < 9; ++k) s += kLanczos[k] / (x + k - 1);
  return s;
}

}  // namespace

double lgamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("lgamma_fn: argument must be positive");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(M_PI / std::sin(M_PI * x)) - lgamma_fn(1.0 - x);
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t +
         std::log(lanczos_sum(z + 1.0));
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
  if (x > 171.0) return std::numeric_limits<double>::infinity();
  if (x < 0.5) return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) *
         lanczos_sum(z + 1.0);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("beta_fn: arguments must be positive");
  // via lgamma to dodge overflow for large arguments
  return std::exp(lgamma_fn(a) + lgamma_fn(b) - lgamma_fn(a + b));
}

MLParams::MLParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  if (!(alpha > 0.0)) throw std::domain_error("MLParams: alpha must be > 0");
  if (!(beta >= 0.0)) throw std::domain_error("MLParams: beta must be >= 0");
}

double mittag_leffler(const MLParams& params, double z) {
  if (!std::isfinite(z))
    throw std::domain_error("mittag_leffler: non-finite argument");
  const double alpha = params.alpha, beta = params.beta;
  double sum = 0.0;
  const int k0 = (beta == 0.0) ? 1 : 0;  // 1/Gamma(0) convention
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int k = k0; k < 10000; ++k) {
    const double la = lgamma_fn(alpha * k + beta);
    double term;
    if (z == 0.0) {
      term = (k == 0) ? std::exp(-la) : 0.0;
    } else {
      const double lt = k * std::log(std::fabs(z)) - la;
      term = std::exp(lt);
      if (z < 0.0 && (k & 1)) term = -term;
    }
    sum += term;
    const double abs_term = std::fabs(term);
    // stop once terms decay and the geometric tail is negligible
    if (k > k0 && abs_term < prev_abs && abs_term < 1e-13 * (std::fabs(sum) + 1e-300)) {
      const double ratio = abs_term / prev_abs;
      if (ratio < 0.5) break;
    }
    if (z == 0.0) break;
    prev_abs = abs_term;
  }
  return sum;
}

double g_mu(double mu, double z) {
  if (!(mu > 0.0)) throw std::domain_error("g_mu: mu must be positive");
  return mittag_leffler(MLParams(mu, 0.0), z);
}

PsiParams::PsiParams(double lambda_, double c_, double mu_)
    : lambda(lambda_), c(c_), mu(mu_) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::domain_error("PsiParams: lambda must be in (0,1)");
  if (!(c >= 0.0)) throw std::domain_error("PsiParams: c must be >= 0");
  if (!(mu > 0.0)) throw std::domain_error("PsiParams: mu must be > 0");
  Lambda = std::fabs(std::log(1.0 - lambda));
}

namespace {

// sum_{m>=m0} c^m exp(-lambda^m z) / Gamma(m mu), with the envelope
// c^m/Gamma(m mu) as tail majorant once terms halve.
double psi_series(const PsiParams& p, double z, int m0) {
  if (z < 0.0) throw std::domain_error("psi: z must be >= 0");
  if (p.c == 0.0) return 0.0;
  const double lc = std::log(p.c);
  double sum = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  for (int m = m0; m < 100000; ++m) {
    const double env = std::exp(m * lc - lgamma_fn(m * p.mu));
    const double term = env * std::exp(-std::pow(p.lambda, m) * z);
    sum += term;
    if (std::isinf(sum)) return sum;  // saturated; further terms cannot help
    if (m > m0 && env < prev_env) {
      const double ratio = env / prev_env;
      if (ratio < 0.5) {
        const double tail = env * ratio / (1.0 - ratio);
        if (tail < 1e-14 * sum && term < 1e-14 * sum) break;
      }
    }
    prev_env = env;
  }
  return sum;
}

}  // namespace

double psi(const PsiParams& params, double z) { return psi_series(params, z, 1); }

double psi_tail2(const PsiParams& params, double z) {
  return psi_series(params, z, 2);
}

PsiDecayReport verify_psi_decay(const PsiParams& params, double B,
                                const std::vector<double>& z_grid) {
  const double threshold = std::exp(std::exp(1.0)) * params.Lambda;
  PsiDecayReport rep;
  rep.grid = z_grid;
  rep.weighted.reserve(z_grid.size());
  double c1 = 0.0;
  for (double z : z_grid) {
    if (z < threshold * (1.0 - 1e-12))
      throw std::domain_error("verify_psi_decay: grid point below e^e*Lambda");
    const double w = psi(params, z) * std::pow(1.0 + z, B);
    rep.weighted.push_back(w);
    if (w > c1) c1 = w;
  }
  // least-squares slope of log w against log z
  const std::size_t n = z_grid.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(z_grid[i]);
    const double ly = std::log(std::max(rep.weighted[i], 1e-300));
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  rep.trend_slope = (denom > 0.0) ? (n * sxy - sx * sy) / denom : 0.0;
  rep.C1_hat = c1;
  rep.bounded = std::isfinite(c1) && rep.trend_slope <= 1e-6;
  return rep;
}

}  // namespace parakern
