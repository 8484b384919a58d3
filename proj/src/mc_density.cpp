#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "parakern/quadrature.hpp"
#include "parakern/validation.hpp"

namespace parakern {

void MCConfig::validate(double tau) const {
  if (paths == 0) throw std::domain_error("MCConfig: paths must be > 0");
  if (!(step > 0.0)) throw std::domain_error("MCConfig: step must be > 0");
  if (!(tau > 0.0)) throw std::domain_error("MCConfig: t must exceed s");
  if (step > 1e-3 * tau * (1.0 + 1e-12))
    throw std::domain_error("MCConfig: step must be <= 1e-3 (t - s)");
  if (!(epsilon > 0.0)) throw std::domain_error("MCConfig: epsilon must be > 0");
  if (bandwidth < 0.0)
    throw std::domain_error("MCConfig: bandwidth must be >= 0 (0 = automatic)");
}

namespace {

constexpr double kExplosionRadius = 1e3;

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based per-path stream: every (path, counter) pair maps to an
// independent uniform; no sequential generator state, so the simulation
// order (and thread count) cannot change the draws.
inline double uniform01(std::uint64_t seed, std::uint64_t path,
                        std::uint64_t ctr) {
  std::uint64_t v = splitmix64(seed ^ splitmix64(path * 0x632be59bd9b4e019ull +
                                                 ctr * 0x9e3779b97f4a7c15ull));
  return ((v >> 11) + 0.5) * 0x1.0p-53;
}

inline double normal_draw(std::uint64_t seed, std::uint64_t path,
                          std::uint64_t ctr) {
  const double u1 = uniform01(seed, path, 2 * ctr);
  const double u2 = uniform01(seed, path, 2 * ctr + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

MCDensityResult mc_density(const SpaceTimePair& pair, const DriftSpec& drift,
                           const MCConfig& config) {
  drift.validate();
  const double tau = pair.t - pair.s;
  config.validate(tau);

  const std::int64_t n = static_cast<std::int64_t>(config.paths);
  const int nst = std::max(1, static_cast<int>(std::ceil(tau / config.step)));
  const double h = tau / nst, sqh = std::sqrt(h);
  const double eps = config.epsilon, gamma = drift.gamma;

  // p(t,x,s,.) in its source arguments solves the adjoint (forward
  // Fokker-Planck) problem: it is the time-s' = t - sigma density of
  //   dX = b(t - sigma, X) (|X|+eps)^{-gamma} dsigma + dW,   X(0) = x,
  // at sigma = t - s.  So paths start at x and the density is read at y.
  std::vector<double> endpoint(n);
  std::int64_t exploded = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : exploded)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    double X = pair.x;
    bool dead = false;
    for (int k = 0; k < nst; ++k) {
      const double time = pair.t - k * h;
      const double c =
          drift.b(time, X) / std::pow(std::fabs(X) + eps, gamma);
      X += c * h + sqh * normal_draw(config.seed, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(k));
      if (std::fabs(X) > kExplosionRadius) {
        dead = true;
        break;
      }
    }
    endpoint[i] = dead ? std::nan("") : X;
    if (dead) ++exploded;
  }

  MCDensityResult res;
  res.exploded = static_cast<std::uint64_t>(exploded);
  if (exploded > 0 &&
      static_cast<double>(exploded) > 1e-3 * static_cast<double>(n))
    throw OracleFailure("mc_density: explosion fraction " +
                        std::to_string(static_cast<double>(exploded) /
                                       static_cast<double>(n)));

  const std::int64_t alive = n - exploded;
  double bw = config.bandwidth;
  if (bw == 0.0) {
    // Silverman's rule scaled by 0.8 on the surviving sample
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      if (!std::isnan(endpoint[i])) mean += endpoint[i];
    mean /= alive;
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      if (!std::isnan(endpoint[i])) {
        const double d = endpoint[i] - mean;
        var += d * d;
      }
    var /= std::max<std::int64_t>(alive - 1, 1);
    bw = 0.8 * 1.06 * std::sqrt(var) *
         std::pow(static_cast<double>(alive), -0.2);
  }
  res.bandwidth = bw;

  // kernel density estimate at y with a fixed summation order
  std::vector<double> contrib(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    if (std::isnan(endpoint[i])) {
      contrib[i] = 0.0;
      continue;
    }
    const double u = (endpoint[i] - pair.y) / bw;
    contrib[i] = std::exp(-0.5 * u * u) / (std::sqrt(2.0 * M_PI) * bw);
  }
  const double sum = pairwise_sum(contrib);
  res.density = sum / static_cast<double>(alive);

  double var_k = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    if (!std::isnan(endpoint[i])) {
      const double d = contrib[i] - res.density;
      var_k += d * d;
    }
  var_k /= std::max<std::int64_t>(alive - 1, 1);
  res.halfwidth = 2.0 * std::sqrt(var_k / static_cast<double>(alive));
  return res;
}

}  // namespace parakern
