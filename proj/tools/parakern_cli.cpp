#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "parakern/run_config.hpp"

namespace {

using namespace parakern;

struct Options {
  std::string config_path;
  std::string out_path;
  int threads = 0;
  bool verbose = false;
};

std::string fmt(double v, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
}

RunConfig load(const Options& opt) {
  std::string path = opt.config_path;
  if (path.empty()) {
    const char* dir = std::getenv("PARAKERN_CONFIG_DIR");
    if (!dir)
      throw ConfigError(
          "no --config given and PARAKERN_CONFIG_DIR is not set");
    path = std::string(dir) + "/default.ini";
  }
  RunConfig cfg = load_run_config(path);
  if (!opt.out_path.empty()) cfg.output.path = opt.out_path;
  return cfg;
}

void apply_threads(const Options& opt) {
#ifdef _OPENMP
  if (opt.threads > 0) omp_set_num_threads(opt.threads);
#else
  (void)opt;
#endif
}

int cmd_eval_kernel(const Options& opt) {
  const RunConfig cfg = load(opt);
  apply_threads(opt);
  const DriftSpec drift = cfg.make_drift();
  const int pr = cfg.output.precision;
  std::ostringstream csv;
  csv << "t,x,s,y,Z,p";
  for (int m = 1; m <= cfg.neumann.max_order; ++m) csv << ",term_" << m;
  csv << ",tail_bound\n";
  // one shared chain per (t,x) anchor serves every (s,y) row under it
  for (double t : cfg.grids.t_values()) {
    for (double x : cfg.grids.x_values()) {
      KernelChain chain(KernelChain::Anchor::Target, t, x, cfg.grids.s_min,
                        drift, cfg.neumann);
      for (double s : cfg.grids.s_values()) {
        for (double y : cfg.grids.y_values()) {
          const SpaceTimePair pair(t, x, s, y);
          const NeumannResult r = chain.evaluate(s, y);
          csv << fmt(t, pr) << ',' << fmt(x, pr) << ',' << fmt(s, pr) << ','
              << fmt(y, pr) << ',' << fmt(Z(pair), pr) << ','
              << fmt(r.value_p, pr);
          for (int m = 1; m <= cfg.neumann.max_order; ++m) {
            const double term =
                m <= static_cast<int>(r.terms.size()) ? r.terms[m - 1] : 0.0;
            csv << ',' << fmt(term, pr);
          }
          csv << ',' << fmt(r.analytic_tail_bound, pr) << '\n';
        }
      }
      if (opt.verbose)
        std::cerr << "eval-kernel: finished anchor t=" << t << " x=" << x
                  << "\n";
    }
  }
  write_text(cfg.output.path, csv.str());
  return 0;
}

int cmd_eval_bounds(const Options& opt) {
  const RunConfig cfg = load(opt);
  apply_threads(opt);
  const DriftSpec drift = cfg.make_drift();
  const int pr = cfg.output.precision;
  std::ostringstream csv;
  csv << "t,x,s,y,lower,p,upper_series,q_upper,regime_flag\n";
  for (double t : cfg.grids.t_values()) {
    for (double x : cfg.grids.x_values()) {
      KernelChain chain(KernelChain::Anchor::Target, t, x, cfg.grids.s_min,
                        drift, cfg.neumann);
      for (double s : cfg.grids.s_values()) {
        for (double y : cfg.grids.y_values()) {
          const SpaceTimePair pair(t, x, s, y);
          const double p = chain.evaluate(s, y).value_p;
          const double upper =
              upper_estimate_series(pair, drift, cfg.neumann.delta);
          const bool regime = q_regime_holds(pair, drift.gamma, cfg.bounds.B);
          const double q = regime ? q_upper(pair, drift, cfg.bounds.B)
                                  : std::nan("");
          const double lower =
              (regime && drift.K_minus > 0.0)
                  ? lower_estimate(pair, drift, cfg.bounds.delta,
                                   cfg.bounds.B1, cfg.bounds.C6)
                  : std::nan("");
          csv << fmt(t, pr) << ',' << fmt(x, pr) << ',' << fmt(s, pr) << ','
              << fmt(y, pr) << ',' << fmt(lower, pr) << ',' << fmt(p, pr)
              << ',' << fmt(upper, pr) << ',' << fmt(q, pr) << ','
              << (regime ? 1 : 0) << '\n';
        }
      }
    }
  }
  write_text(cfg.output.path, csv.str());
  return 0;
}

int cmd_solve(const Options& opt) {
  const RunConfig cfg = load(opt);
  apply_threads(opt);
  const DriftSpec drift = cfg.make_drift();
  const int pr = cfg.output.precision;
  const double s = cfg.grids.s_min;
  InitialData f;
  if (cfg.solve.initial == "gaussian") {
    f.f = [](double y) { return std::exp(-y * y); };
    f.W0 = 1.0;
    f.W = 0.0;
  } else if (cfg.solve.initial == "one") {
    f.f = [](double) { return 1.0; };
    f.W0 = 1.0;
    f.W = 0.0;
  } else {  // linear
    f.f = [](double y) { return y; };
    f.W0 = 1.0;
    f.W = 1.0;
  }
  if (cfg.solve.W0 != 1.0) f.W0 = cfg.solve.W0;
  if (cfg.solve.W != 0.0) f.W = cfg.solve.W;
  const double gval = cfg.solve.source == "one" ? 1.0 : 0.0;
  std::ostringstream csv;
  csv << "t,x,u\n";
  for (double t : cfg.grids.t_values()) {
    for (double x : cfg.grids.x_values()) {
      double u;
      if (cfg.solve.problem == "cauchy")
        u = solve_cauchy(t, x, s, f, drift, cfg.neumann);
      else
        u = solve_nonhomogeneous(
            t, x, s, [&](double, double) { return gval; }, drift,
            cfg.neumann);
      csv << fmt(t, pr) << ',' << fmt(x, pr) << ',' << fmt(u, pr) << '\n';
      if (opt.verbose) std::cerr << "solve: t=" << t << " x=" << x << "\n";
    }
  }
  write_text(cfg.output.path, csv.str());
  return 0;
}

int cmd_validate(const Options& opt) {
  const RunConfig cfg = load(opt);
  apply_threads(opt);
  const DriftSpec drift = cfg.make_drift();
  const InvariantReport rep =
      run_invariant_suite(drift, cfg.grids, cfg.neumann, cfg.bounds);
  write_text(cfg.output.path, rep.to_json());
  if (opt.verbose)
    for (const auto& e : rep.entries)
      std::cerr << (e.pass ? "pass " : "FAIL ") << e.name
                << "  residual=" << e.residual << "\n";
  return rep.all_pass() ? 0 : 1;
}

int cmd_calibrate_bounds(const Options& opt) {
  RunConfig cfg = load(opt);
  apply_threads(opt);
  const DriftSpec drift = cfg.make_drift();
  const double c6 = calibrate_lower_constant(drift, cfg.grids, cfg.neumann,
                                             cfg.bounds.delta, cfg.bounds.B1);
  cfg.bounds.C6 = c6;
  cfg.bounds_grid_hash = cfg.grid_hash();
  if (opt.verbose) std::cerr << "calibrated C6 = " << c6 << "\n";
  write_text(cfg.output.path, serialize_run_config(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parakern: parametrix construction of the fundamental "
               "solution with singular first-order coefficient"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "run configuration file");
  app.add_option("--out", opt.out_path, "output path (overrides config)");
  app.add_option("--threads", opt.threads, "worker thread count");
  app.add_flag("--verbose", opt.verbose, "progress to stderr");

  int (*run)(const Options&) = nullptr;
  // fallthrough lets --config etc. appear after the subcommand name
  app.add_subcommand("eval-kernel", "tabulate Z, p and series terms")
      ->fallthrough()
      ->callback([&] { run = cmd_eval_kernel; });
  app.add_subcommand("eval-bounds", "tabulate p against its bounds")
      ->fallthrough()
      ->callback([&] { run = cmd_eval_bounds; });
  app.add_subcommand("solve", "Cauchy / nonhomogeneous solution values")
      ->fallthrough()
      ->callback([&] { run = cmd_solve; });
  app.add_subcommand("validate", "run the invariant suite, JSON report")
      ->fallthrough()
      ->callback([&] { run = cmd_validate; });
  app.add_subcommand("calibrate-bounds",
                     "calibrate the minorant constant, emit updated config")
      ->fallthrough()
      ->callback([&] { run = cmd_calibrate_bounds; });

  CLI11_PARSE(app, argc, argv);
  try {
    return run(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const OracleFailure& e) {
    std::cerr << "oracle failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
