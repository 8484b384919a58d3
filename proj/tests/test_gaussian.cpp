#include <cmath>
#include <stdexcept>
#include <random>

#include <doctest.h>

#include "parakern/gaussian.hpp"
#include "parakern/special_functions.hpp"

using namespace parakern;

TEST_CASE("heat kernel values and derivative") {
  const SpaceTimePair pair(1.0, 1.0, 0.0, 0.0);
  CHECK(Z(pair) ==
        doctest::Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(dZ_dx(pair) == doctest::Approx(-0.2419707245).epsilon(1e-9));
  // dZ_dx against central differences of Z
  for (double u : {-1.5, -0.4, 0.3, 2.0}) {
    const double tau = 0.5, h = 1e-6;
    const double fd = (Z(tau, u + h) - Z(tau, u - h)) / (2.0 * h);
    CHECK(dZ_dx(tau, u) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(SpaceTimePair(0.0, 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("dZ_dx pointwise bound dominates") {
  for (double delta : {0.2, 0.5, 0.8})
    for (double tau : {0.05, 0.5, 2.0})
      for (double u = -4.0; u <= 4.0; u += 0.37) {
        const SpaceTimePair pair(tau, u, 0.0, 0.0);
        CHECK(std::fabs(dZ_dx(pair)) <=
              dZ_dx_bound(pair, delta) * (1.0 + 1e-12));
      }
}

TEST_CASE("Gaussian convolution closed form") {
  const GaussTriple triple(0.6, 0.8, 1.0);
  // brute-force the integral on a fine trapezoid grid
  const double x = 0.7, y = -0.3;
  double acc = 0.0;
  const double h = 1e-3;
  for (double z = -8.0; z <= 8.0; z += h) {
    const double a = (x - z) / triple.sigma1, b = (z - y) / triple.sigma2;
    acc += h * std::exp(-0.5 * (a * a + b * b));
  }
  CHECK(gauss_convolution_closed_form(x, y, triple) ==
        doctest::Approx(acc).epsilon(1e-6));
  CHECK_THROWS_AS(GaussTriple(1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("kappa minimization identity") {
  CHECK(kappa(0.25) == doctest::Approx(1.7547653).epsilon(1e-6));
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> uni(0.1, 3.0), ug(0.1, 0.9);
  for (int rep = 0; rep < 20; ++rep) {
    const double A = uni(rng), B = uni(rng), g = ug(rng);
    double best = 1e300;
    for (double D = 1e-3; D < 1e3; D *= 1.0005)
      best = std::min(best, A * std::pow(D, 1.0 - g) + B * std::pow(D, -g));
    CHECK(best == doctest::Approx(kappa(g) * std::pow(A, g) *
                                  std::pow(B, 1.0 - g))
                      .epsilon(1e-6));
  }
}

TEST_CASE("singular integral J and its closed-form bound") {
  const double t = 1.0, s = 0.0;
  for (double gamma : {0.25, 0.5, 0.75})
    for (double r : {0.2, 0.5, 0.8})
      for (double x : {-1.0, 0.4, 1.5}) {
        const double y = 0.3;
        const double J = J_integral(x, y, t, r, s, gamma);
        CHECK(J > 0.0);
        CHECK(J <= J_integral_bound(x, y, t, r, s, gamma) * (1.0 + 1e-10));
      }
}

TEST_CASE("J_delta scaling relation and bound") {
  const double t = 0.8, s = 0.0, r = 0.3, gamma = 0.5;
  for (double delta : {0.2, 0.5})
    for (double x : {-0.7, 1.2}) {
      const double y = 0.25;
      const double lhs = J_delta_integral(x, y, t, r, s, gamma, delta);
      const double rhs =
          std::pow(1.0 - delta, 0.5 * (gamma - 1.0)) *
          J_integral(x * std::sqrt(1.0 - delta), y * std::sqrt(1.0 - delta),
                     t, r, s, gamma);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      CHECK(lhs <= J_delta_integral_bound(x, y, t, r, s, gamma, delta) *
                       (1.0 + 1e-10));
    }
}
