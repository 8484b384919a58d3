#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "parakern/special_functions.hpp"

using namespace parakern;

TEST_CASE("gamma function against closed-form values") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-13));
  // recurrence Gamma(x+1) = x Gamma(x) across a sweep
  for (double x = 0.1; x < 6.0; x += 0.31)
    CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
  CHECK(std::exp(lgamma_fn(7.3)) == doctest::Approx(gamma_fn(7.3)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(-1.0), std::domain_error);
}

TEST_CASE("beta function symmetry and values") {
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(beta_fn(0.25, 0.75) ==
        doctest::Approx(M_PI / std::sin(0.25 * M_PI)).epsilon(1e-12));
  CHECK(beta_fn(0.3, 1.7) == doctest::Approx(beta_fn(1.7, 0.3)).epsilon(1e-13));
}

TEST_CASE("Mittag-Leffler identities") {
  // E_{1,1}(z) = exp(z), E_{2,1}(z) = cosh(sqrt z)
  for (double z = 0.0; z <= 5.0; z += 0.25) {
    CHECK(mittag_leffler(MLParams(1.0, 1.0), z) ==
          doctest::Approx(std::exp(z)).epsilon(1e-10));
    CHECK(mittag_leffler(MLParams(2.0, 1.0), z) ==
          doctest::Approx(std::cosh(std::sqrt(z))).epsilon(1e-10));
  }
  // E_{1,2}(z) = (exp(z) - 1)/z
  CHECK(mittag_leffler(MLParams(1.0, 2.0), 2.0) ==
        doctest::Approx(0.5 * (std::exp(2.0) - 1.0)).epsilon(1e-10));
}

TEST_CASE("g_mu slice of the Mittag-Leffler family") {
  // g_mu(z) = sum_{m>=1} z^m / Gamma(m mu); for mu = 1 this is
  // sum z^m/(m-1)! = z exp(z)
  for (double z = 0.1; z <= 3.0; z += 0.7)
    CHECK(g_mu(1.0, z) == doctest::Approx(z * std::exp(z)).epsilon(1e-11));
  // direct partial sum cross-check at mu = 0.5
  const double z = 0.8, mu = 0.5;
  double ref = 0.0;
  for (int m = 1; m < 200; ++m) ref += std::pow(z, m) / gamma_fn(m * mu);
  CHECK(g_mu(mu, z) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("psi series: value at zero and monotonicity") {
  PsiParams ps(0.5, 1.0, 2.0);
  // at z = 0 the exponentials vanish and psi(0) = g_mu(c)
  CHECK(psi(ps, 0.0) == doctest::Approx(g_mu(2.0, 1.0)).epsilon(1e-13));
  double prev = psi(ps, 0.0);
  for (double z = 0.5; z <= 50.0; z *= 2.0) {
    const double v = psi(ps, z);
    CHECK(v > 0.0);
    CHECK(v <= prev);
    prev = v;
  }
  // psi_tail2 = psi minus the m = 1 term
  const double z = 2.0;
  CHECK(psi_tail2(ps, z) ==
        doctest::Approx(psi(ps, z) -
                        ps.c * std::exp(-ps.lambda * z) / gamma_fn(ps.mu))
            .epsilon(1e-12));
}

TEST_CASE("psi polynomial decay verification") {
  PsiParams ps(0.5, 1.0, 2.0);
  for (double B : {1.0, 2.0, 4.0}) {
    std::vector<double> grid;
    const double z0 = std::exp(M_E) * ps.Lambda;
    for (double z = z0; z <= 1e3; z *= 1.35) grid.push_back(z);
    const PsiDecayReport rep = verify_psi_decay(ps, B, grid);
    CHECK(rep.bounded);
    CHECK(std::isfinite(rep.C1_hat));
    CHECK(rep.trend_slope <= 1e-6);
  }
  // grid points below the regime threshold are rejected
  const std::vector<double> bad_grid{0.1};
  CHECK_THROWS_AS(verify_psi_decay(ps, 4.0, bad_grid), std::domain_error);
}
