#include <doctest.h>

#include "parakern/run_config.hpp"

using namespace parakern;

namespace {

const char* kMinimal =
    "[drift]\n"
    "coefficient = constant\n"
    "gamma = 0.5\n"
    "K = 0.5\n";

}  // namespace

TEST_CASE("minimal config parses with defaults filled in") {
  const RunConfig c = parse_run_config(kMinimal);
  CHECK(c.drift_gamma == 0.5);
  CHECK(c.neumann.max_order == 4);
  CHECK(c.output.format == "csv");
  CHECK(c.grids.t_count == 3);
  const DriftSpec d = c.make_drift();
  CHECK(d.K == 0.5);
  CHECK(d.b(0.0, 1.0) == 0.5);
  CHECK(c.neumann.space_rule.gamma == 0.5);  // synced to the drift
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  const RunConfig c = parse_run_config(
      "# leading comment\n\n[drift]\n  gamma =  0.25  ; trailing\n"
      "coefficient = bounded-oscillatory\nK = 1.0\nK_minus = 0.2\n");
  CHECK(c.drift_gamma == 0.25);
  const DriftSpec d = c.make_drift();
  CHECK(d.K_minus == 0.2);
  CHECK(d.b(0.0, 0.0) == doctest::Approx(1.0 * (0.6 + 0.4)).epsilon(1e-12));
}

TEST_CASE("strict rejection of malformed input") {
  CHECK_THROWS_AS(parse_run_config("[drift]\nbogus_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[nosuch]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[drift]\ngamma = 0.5\ngamma = 0.6\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("[drift]\ngamma = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("gamma = 0.5\n"), ConfigError);  // no section
  CHECK_THROWS_AS(parse_run_config("[drift]\ngamma 0.5\n"), ConfigError);
  // range violations surface as config errors too
  CHECK_THROWS_AS(parse_run_config("[drift]\ngamma = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[output]\nformat = xml\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[drift]\ncoefficient = sin\n"),
                  ConfigError);
}

TEST_CASE("serialization round-trips to a normalized fixed point") {
  RunConfig c = parse_run_config(kMinimal);
  c.neumann.max_order = 6;
  c.grids.x_count = 7;
  c.bounds.C6 = -0.125;
  const std::string text = serialize_run_config(c);
  const RunConfig back = parse_run_config(text);
  CHECK(serialize_run_config(back) == text);
  CHECK(back.neumann.max_order == 6);
  CHECK(back.grids.x_count == 7);
  CHECK(back.bounds.C6 == -0.125);
}

TEST_CASE("calibration constants are tied to their grid") {
  RunConfig c = parse_run_config(kMinimal);
  const std::string good = c.grid_hash();
  std::string text = serialize_run_config(c);
  text += "\n[bounds.calibration]\nC6 = 0.5\n";
  CHECK_THROWS_AS(parse_run_config(text), ConfigError);  // duplicate key
  RunConfig c2 = parse_run_config(kMinimal);
  c2.bounds_grid_hash = good;
  CHECK_NOTHROW(c2.validate());
  c2.grids.x_max = 3.0;  // grid changed; stored hash is now stale
  CHECK_THROWS_AS(c2.validate(), ConfigError);
}

TEST_CASE("missing file is a config error") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/path.ini"), ConfigError);
}
