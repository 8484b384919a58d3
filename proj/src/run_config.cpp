#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parakern/run_config.hpp"

namespace parakern {

DriftSpec RunConfig::make_drift() const {
  DriftSpec d;
  if (drift_coefficient == "zero")
    d = DriftSpec::zero(drift_gamma);
  else if (drift_coefficient == "constant")
    d = DriftSpec::constant(drift_K, drift_gamma);
  else if (drift_coefficient == "bounded-oscillatory")
    d = DriftSpec::bounded_oscillatory(drift_K, drift_gamma);
  else
    throw ConfigError("drift.coefficient: unknown selector '" +
                      drift_coefficient + "'");
  d.K_minus = drift_K_minus;
  return d;
}

std::string RunConfig::grid_hash() const {
  // FNV-1a over the exact axis text; any grid change invalidates C6
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%.17g %.17g %d %.17g %.17g %d %.17g %.17g %d %.17g %.17g %d "
                "%.17g",
                grids.t_min, grids.t_max, grids.t_count, grids.x_min,
                grids.x_max, grids.x_count, grids.s_min, grids.s_max,
                grids.s_count, grids.y_min, grids.y_max, grids.y_count,
                grids.exclusion_halfband);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ull;
  }
  char out[20];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

void RunConfig::validate() const {
  make_drift().validate();
  neumann.validate();
  grids.validate();
  fd.validate(grids.t_max);
  mc.validate(grids.t_min - grids.s_max);
  if (!(bounds.B > 0.0)) throw ConfigError("bounds.B must be > 0");
  if (!(bounds.B1 > 0.0)) throw ConfigError("bounds.B1 must be > 0");
  if (!(bounds.delta > 0.0 && bounds.delta < 1.0))
    throw ConfigError("bounds.delta must lie in (0,1)");
  if (output.format != "csv" && output.format != "json")
    throw ConfigError("output.format must be csv or json");
  if (output.precision < 6 || output.precision > 17)
    throw ConfigError("output.precision must lie in [6,17]");
  if (solve.problem != "cauchy" && solve.problem != "nonhomogeneous")
    throw ConfigError("solve.problem must be cauchy or nonhomogeneous");
  if (solve.initial != "gaussian" && solve.initial != "one" &&
      solve.initial != "linear")
    throw ConfigError("solve.initial must be gaussian, one, or linear");
  if (solve.source != "one" && solve.source != "zero")
    throw ConfigError("solve.source must be one or zero");
  if (!(solve.W0 > 0.0)) throw ConfigError("solve.W0 must be > 0");
  if (solve.W < 0.0) throw ConfigError("solve.W must be >= 0");
  if (!bounds_grid_hash.empty() && bounds_grid_hash != grid_hash())
    throw ConfigError(
        "bounds.calibration.grid_hash does not match the configured grid "
        "(C6 was calibrated on a different grid; rerun calibrate-bounds)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Parser {
  RunConfig cfg;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
  }

  double num(const std::string& v) const {
    std::size_t pos = 0;
    double d;
    try {
      d = std::stod(v, &pos);
    } catch (const std::exception&) {
      fail("malformed number '" + v + "'");
    }
    if (pos != v.size()) fail("trailing characters in number '" + v + "'");
    return d;
  }

  int integer(const std::string& v) const {
    const double d = num(v);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) fail("expected integer, got '" + v + "'");
    return i;
  }

  std::uint64_t u64(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const unsigned long long x = std::stoull(v, &pos);
      if (pos != v.size()) fail("trailing characters in '" + v + "'");
      return x;
    } catch (const std::exception&) {
      fail("malformed unsigned integer '" + v + "'");
    }
  }

  void set(const std::string& sec, const std::string& key,
           const std::string& v) {
    RunConfig& c = cfg;
    const std::string full = sec + "." + key;
    if (sec == "drift") {
      if (key == "coefficient") c.drift_coefficient = v;
      else if (key == "gamma") c.drift_gamma = num(v);
      else if (key == "K") c.drift_K = num(v);
      else if (key == "K_minus") c.drift_K_minus = num(v);
      else fail("unknown key " + full);
    } else if (sec == "neumann") {
      if (key == "max_order") c.neumann.max_order = integer(v);
      else if (key == "tail_tolerance") c.neumann.tail_tolerance = num(v);
      else if (key == "delta") c.neumann.delta = num(v);
      else fail("unknown key " + full);
    } else if (sec == "quadrature") {
      if (key == "space_truncation_radius")
        c.neumann.space_rule.truncation_radius_multiplier = num(v);
      else if (key == "space_panels") c.neumann.space_rule.panels = integer(v);
      else if (key == "space_nodes_per_panel")
        c.neumann.space_rule.nodes_per_panel = integer(v);
      else if (key == "time_exponent_left")
        c.neumann.time_rule.exponent_left = num(v);
      else if (key == "time_exponent_right")
        c.neumann.time_rule.exponent_right = num(v);
      else if (key == "time_nodes") c.neumann.time_rule.nodes = integer(v);
      else fail("unknown key " + full);
    } else if (sec == "chain") {
      ChainAccuracy& a = c.neumann.chain;
      if (key == "slices") a.slices = integer(v);
      else if (key == "xi_nodes") a.xi_nodes = integer(v);
      else if (key == "global_nodes") a.global_nodes = integer(v);
      else if (key == "time_panels_per_side")
        a.time_panels_per_side = integer(v);
      else if (key == "time_nodes_per_panel")
        a.time_nodes_per_panel = integer(v);
      else if (key == "time_grading") a.time_grading = num(v);
      else if (key == "space_nodes_per_panel")
        a.space_nodes_per_panel = integer(v);
      else if (key == "space_panels") a.space_panels = integer(v);
      else if (key == "eval_time_panels_per_side")
        a.eval_time_panels_per_side = integer(v);
      else if (key == "eval_time_nodes_per_panel")
        a.eval_time_nodes_per_panel = integer(v);
      else if (key == "eval_space_nodes_per_panel")
        a.eval_space_nodes_per_panel = integer(v);
      else fail("unknown key " + full);
    } else if (sec == "grids") {
      GridSpec& g = c.grids;
      if (key == "t_min") g.t_min = num(v);
      else if (key == "t_max") g.t_max = num(v);
      else if (key == "t_count") g.t_count = integer(v);
      else if (key == "x_min") g.x_min = num(v);
      else if (key == "x_max") g.x_max = num(v);
      else if (key == "x_count") g.x_count = integer(v);
      else if (key == "s_min") g.s_min = num(v);
      else if (key == "s_max") g.s_max = num(v);
      else if (key == "s_count") g.s_count = integer(v);
      else if (key == "y_min") g.y_min = num(v);
      else if (key == "y_max") g.y_max = num(v);
      else if (key == "y_count") g.y_count = integer(v);
      else if (key == "exclusion_halfband") g.exclusion_halfband = num(v);
      else fail("unknown key " + full);
    } else if (sec == "bounds") {
      if (key == "B") c.bounds.B = num(v);
      else if (key == "B1") c.bounds.B1 = num(v);
      else if (key == "delta") c.bounds.delta = num(v);
      else fail("unknown key " + full);
    } else if (sec == "bounds.calibration") {
      if (key == "C6") c.bounds.C6 = num(v);
      else if (key == "grid_hash") c.bounds_grid_hash = v;
      else fail("unknown key " + full);
    } else if (sec == "oracle") {
      if (key == "fd_epsilon") c.fd.epsilon = num(v);
      else if (key == "fd_dx") c.fd.dx = num(v);
      else if (key == "fd_dt") c.fd.dt = num(v);
      else if (key == "fd_domain_halfwidth") c.fd.domain_halfwidth = num(v);
      else if (key == "mc_paths") c.mc.paths = u64(v);
      else if (key == "mc_step") c.mc.step = num(v);
      else if (key == "mc_epsilon") c.mc.epsilon = num(v);
      else if (key == "mc_bandwidth") c.mc.bandwidth = num(v);
      else if (key == "mc_seed") c.mc.seed = u64(v);
      else fail("unknown key " + full);
    } else if (sec == "output") {
      if (key == "format") c.output.format = v;
      else if (key == "path") c.output.path = v;
      else if (key == "precision") c.output.precision = integer(v);
      else fail("unknown key " + full);
    } else if (sec == "solve") {
      if (key == "problem") c.solve.problem = v;
      else if (key == "initial") c.solve.initial = v;
      else if (key == "source") c.solve.source = v;
      else if (key == "W0") c.solve.W0 = num(v);
      else if (key == "W") c.solve.W = num(v);
      else fail("unknown key " + full);
    } else {
      fail("unknown section [" + sec + "]");
    }
  }
};

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Parser p;
  std::istringstream in(text);
  std::string raw, section;
  std::vector<std::string> seen;
  while (std::getline(in, raw)) {
    ++p.line_no;
    const std::size_t cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) p.fail("empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (section.empty()) p.fail("key outside any section");
    const std::string full = section + "." + key;
    for (const auto& s : seen)
      if (s == full) p.fail("duplicate key " + full);
    seen.push_back(full);
    p.set(section, key, val);
  }
  // engine rules always integrate the drift's own singularity
  p.cfg.neumann.space_rule.gamma = p.cfg.drift_gamma;
  p.line_no = 0;
  try {
    p.cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p.cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& c) {
  std::ostringstream out;
  char buf[40];
  const auto n = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "[drift]\n";
  out << "coefficient = " << c.drift_coefficient << "\n";
  out << "gamma = " << n(c.drift_gamma) << "\n";
  out << "K = " << n(c.drift_K) << "\n";
  out << "K_minus = " << n(c.drift_K_minus) << "\n\n";
  out << "[neumann]\n";
  out << "max_order = " << c.neumann.max_order << "\n";
  out << "tail_tolerance = " << n(c.neumann.tail_tolerance) << "\n";
  out << "delta = " << n(c.neumann.delta) << "\n\n";
  out << "[quadrature]\n";
  out << "space_truncation_radius = "
      << n(c.neumann.space_rule.truncation_radius_multiplier) << "\n";
  out << "space_panels = " << c.neumann.space_rule.panels << "\n";
  out << "space_nodes_per_panel = " << c.neumann.space_rule.nodes_per_panel
      << "\n";
  out << "time_exponent_left = " << n(c.neumann.time_rule.exponent_left)
      << "\n";
  out << "time_exponent_right = " << n(c.neumann.time_rule.exponent_right)
      << "\n";
  out << "time_nodes = " << c.neumann.time_rule.nodes << "\n\n";
  const ChainAccuracy& a = c.neumann.chain;
  out << "[chain]\n";
  out << "slices = " << a.slices << "\n";
  out << "xi_nodes = " << a.xi_nodes << "\n";
  out << "global_nodes = " << a.global_nodes << "\n";
  out << "time_panels_per_side = " << a.time_panels_per_side << "\n";
  out << "time_nodes_per_panel = " << a.time_nodes_per_panel << "\n";
  out << "time_grading = " << n(a.time_grading) << "\n";
  out << "space_nodes_per_panel = " << a.space_nodes_per_panel << "\n";
  out << "space_panels = " << a.space_panels << "\n";
  out << "eval_time_panels_per_side = " << a.eval_time_panels_per_side << "\n";
  out << "eval_time_nodes_per_panel = " << a.eval_time_nodes_per_panel << "\n";
  out << "eval_space_nodes_per_panel = " << a.eval_space_nodes_per_panel
      << "\n\n";
  const GridSpec& g = c.grids;
  out << "[grids]\n";
  out << "t_min = " << n(g.t_min) << "\n";
  out << "t_max = " << n(g.t_max) << "\n";
  out << "t_count = " << g.t_count << "\n";
  out << "x_min = " << n(g.x_min) << "\n";
  out << "x_max = " << n(g.x_max) << "\n";
  out << "x_count = " << g.x_count << "\n";
  out << "s_min = " << n(g.s_min) << "\n";
  out << "s_max = " << n(g.s_max) << "\n";
  out << "s_count = " << g.s_count << "\n";
  out << "y_min = " << n(g.y_min) << "\n";
  out << "y_max = " << n(g.y_max) << "\n";
  out << "y_count = " << g.y_count << "\n";
  out << "exclusion_halfband = " << n(g.exclusion_halfband) << "\n\n";
  out << "[bounds]\n";
  out << "B = " << n(c.bounds.B) << "\n";
  out << "B1 = " << n(c.bounds.B1) << "\n";
  out << "delta = " << n(c.bounds.delta) << "\n\n";
  out << "[bounds.calibration]\n";
  out << "C6 = " << n(c.bounds.C6) << "\n";
  if (!c.bounds_grid_hash.empty())
    out << "grid_hash = " << c.bounds_grid_hash << "\n";
  out << "\n[oracle]\n";
  out << "fd_epsilon = " << n(c.fd.epsilon) << "\n";
  out << "fd_dx = " << n(c.fd.dx) << "\n";
  out << "fd_dt = " << n(c.fd.dt) << "\n";
  out << "fd_domain_halfwidth = " << n(c.fd.domain_halfwidth) << "\n";
  out << "mc_paths = " << c.mc.paths << "\n";
  out << "mc_step = " << n(c.mc.step) << "\n";
  out << "mc_epsilon = " << n(c.mc.epsilon) << "\n";
  out << "mc_bandwidth = " << n(c.mc.bandwidth) << "\n";
  out << "mc_seed = " << c.mc.seed << "\n\n";
  out << "[output]\n";
  out << "format = " << c.output.format << "\n";
  if (!c.output.path.empty()) out << "path = " << c.output.path << "\n";
  out << "precision = " << c.output.precision << "\n\n";
  out << "[solve]\n";
  out << "problem = " << c.solve.problem << "\n";
  out << "initial = " << c.solve.initial << "\n";
  out << "source = " << c.solve.source << "\n";
  out << "W0 = " << n(c.solve.W0) << "\n";
  out << "W = " << n(c.solve.W) << "\n";
  return out.str();
}

}  // namespace parakern
