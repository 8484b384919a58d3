#include <cmath>
#include <cstring>

#include <doctest.h>
#include <json.hpp>

#include "parakern/validation.hpp"

using namespace parakern;

TEST_CASE("grid spec: exclusion band and validation") {
  GridSpec g;
  const auto xs = g.x_values();
  for (double x : xs) CHECK(std::fabs(x) >= g.exclusion_halfband);
  CHECK(xs.size() == 4);  // the x = 0 node of the default 5-point axis drops
  CHECK(g.t_values().size() == 3);
  g.x_count = 1;
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g.x_count = 5;
  g.exclusion_halfband = 5.0;  // removes every node
  CHECK_THROWS_AS(g.x_values(), std::domain_error);
  GridSpec h;
  h.t_min = 0.05;  // below s_max
  CHECK_THROWS_AS(h.validate(), std::domain_error);
}

TEST_CASE("FD oracle reproduces the heat kernel at zero drift") {
  DriftSpec z0 = DriftSpec::zero(0.5);
  FDConfig fd;
  fd.dx = 2e-3;
  fd.dt = 2e-3;
  fd.domain_halfwidth = 4.0;
  const SpaceTimePair pair(0.1, 0.3, 0.0, 0.0);
  const double v = fd_density_raw(pair, z0, fd);
  CHECK(v == doctest::Approx(Z(pair)).epsilon(2e-5));
  const double ve = fd_reference_density(pair, z0, fd);
  CHECK(ve == doctest::Approx(Z(pair)).epsilon(2e-6));
}

TEST_CASE("FD oracle self-convergence under grid halving") {
  DriftSpec d = DriftSpec::constant(0.5, 0.5);
  FDConfig fd;
  fd.epsilon = 1e-2;
  fd.domain_halfwidth = 4.0;
  const SpaceTimePair pair(0.2, -0.5, 0.0, 0.0);
  double v[3];
  const double steps[3] = {2e-3, 1e-3, 5e-4};
  for (int l = 0; l < 3; ++l) {
    fd.dx = steps[l];
    fd.dt = steps[l];
    v[l] = fd_density_raw(pair, d, fd);
  }
  const double d1 = v[1] - v[0], d2 = v[2] - v[1];
  // second-order scheme: each halving should cut the change to ~1/4
  CHECK(std::fabs(d2) < 0.35 * std::fabs(d1));
}

TEST_CASE("FD oracle configuration guards") {
  DriftSpec d = DriftSpec::constant(0.5, 0.5);
  FDConfig fd;
  fd.dt = 1.0;  // dt > dx
  CHECK_THROWS_AS(fd.validate(0.5), std::domain_error);
  FDConfig fd2;
  fd2.domain_halfwidth = 8.0;
  CHECK_THROWS_AS(
      fd_density_raw(SpaceTimePair(0.5, 7.9, 0.0, 0.0), d, fd2),
      std::domain_error);
}

TEST_CASE("MC oracle agrees with the heat kernel at zero drift") {
  DriftSpec z0 = DriftSpec::zero(0.5);
  MCConfig mc;
  mc.paths = 40000;
  mc.step = 1e-4;
  const SpaceTimePair pair(0.1, 0.3, 0.0, 0.0);
  const MCDensityResult r = mc_density(pair, z0, mc);
  CHECK(r.exploded == 0);
  // statistical halfwidth plus a kernel-smoothing bias allowance
  CHECK(std::fabs(r.density - Z(pair)) <=
        2.0 * r.halfwidth + 0.02 * Z(pair));
}

TEST_CASE("MC oracle is deterministic for a fixed seed") {
  DriftSpec d = DriftSpec::constant(0.5, 0.5);
  MCConfig mc;
  mc.paths = 5000;
  mc.step = 1e-4;
  const SpaceTimePair pair(0.1, 0.5, 0.0, 0.25);
  const MCDensityResult a = mc_density(pair, d, mc);
  const MCDensityResult b = mc_density(pair, d, mc);
  CHECK(std::memcmp(&a.density, &b.density, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.halfwidth, &b.halfwidth, sizeof(double)) == 0);
  mc.seed ^= 1;
  const MCDensityResult c = mc_density(pair, d, mc);
  CHECK(c.density != a.density);
}

TEST_CASE("MC oracle configuration guards") {
  MCConfig mc;
  mc.step = 1e-3;  // too coarse for tau = 0.1
  CHECK_THROWS_AS(mc.validate(0.1), std::domain_error);
}

TEST_CASE("invariant report serialization") {
  InvariantReport rep;
  rep.entries.push_back({"alpha", 3, 1.0 / 3.0, 1e-3, true});
  rep.entries.push_back({"beta", 1, 0.5, 0.25, false});
  CHECK(!rep.all_pass());
  const std::string text = rep.to_json();
  CHECK(text == rep.to_json());  // byte-stable
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["all_pass"] == false);
  REQUIRE(doc["entries"].size() == 2);
  CHECK(doc["entries"][0]["name"] == "alpha");
  CHECK(doc["entries"][0]["points"] == 3);
  CHECK(doc["entries"][0]["pass"] == true);
  // 17 significant digits survive the round trip exactly
  CHECK(doc["entries"][0]["residual"].get<double>() == 1.0 / 3.0);
  rep.entries[1].pass = true;
  CHECK(rep.all_pass());
}
