// Serial-versus-parallel benchmark of the two OpenMP kernels: the chain
// field tabulation and the Monte Carlo density estimator.  Also verifies
// that the results are bit-identical across thread counts (fixed node
// order, pairwise summation, counter-based streams).

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "parakern/validation.hpp"

using namespace parakern;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

struct Timing {
  double seconds;
  double value;  // digest of the produced numbers
};

Timing bench_chain(const DriftSpec& drift, const NeumannConfig& cfg) {
  const double t0 = now();
  KernelChain chain(KernelChain::Anchor::Target, 0.5, 1.0, 0.0, drift, cfg);
  double digest = 0.0;
  for (double y = -2.0; y <= 2.0; y += 0.125)
    digest += chain.evaluate(0.0, y).value_p;
  return {now() - t0, digest};
}

Timing bench_mc(const DriftSpec& drift) {
  MCConfig mc;
  mc.paths = 200000;
  mc.step = 2e-4;
  const SpaceTimePair pair(0.5, 1.0, 0.0, 0.25);
  const double t0 = now();
  const MCDensityResult r = mc_density(pair, drift, mc);
  return {now() - t0, r.density};
}

void report(const char* name, const Timing& serial, const Timing& parallel,
            int threads) {
  const bool identical = std::memcmp(&serial.value, &parallel.value,
                                     sizeof(double)) == 0;
  std::printf("%-14s serial %8.3f s   %d threads %8.3f s   speedup %5.2fx   "
              "bit-identical %s\n",
              name, serial.seconds, threads, parallel.seconds,
              serial.seconds / parallel.seconds, identical ? "yes" : "NO");
}

}  // namespace

int main() {
  const int nthreads = max_threads();
  DriftSpec drift = DriftSpec::constant(0.5, 0.5);
  NeumannConfig cfg;

  set_threads(1);
  const Timing chain_s = bench_chain(drift, cfg);
  const Timing mc_s = bench_mc(drift);
  set_threads(nthreads);
  const Timing chain_p = bench_chain(drift, cfg);
  const Timing mc_p = bench_mc(drift);

  report("chain-field", chain_s, chain_p, nthreads);
  report("mc-density", mc_s, mc_p, nthreads);

  const bool ok = std::memcmp(&chain_s.value, &chain_p.value,
                              sizeof(double)) == 0 &&
                  std::memcmp(&mc_s.value, &mc_p.value, sizeof(double)) == 0;
  return ok ? 0 : 1;
}
