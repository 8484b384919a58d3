#ifndef PARAKERN_PARAMETRIX_HPP
#define PARAKERN_PARAMETRIX_HPP

#include <functional>
#include <memory>
#include <vector>

#include "parakern/gaussian.hpp"
#include "parakern/quadrature.hpp"

// The constructive core: the defect kernel Phi1 = (b/|x|^gamma) dZ/dx, its
// iterated convolutions Phi_m, and the fundamental-solution assembly
//   p = Z + sum_m Z * Phi_m
// truncated with an analytic tail bound.  Evaluation sweeps share work
// through KernelChain, which tabulates the intermediate convolution fields
// once per anchored point and then serves many evaluation points cheaply.

namespace parakern {

struct DriftSpec {
  std::function<double(double, double)> b;  // b(t, x)
  double gamma = 0.5;    // singularity exponent, in (0,1)
  double K = 0.0;        // sup_{t,x} |b|
  double K_minus = 0.0;  // inf_{t,x} b when positive; 0 means "not declared"
  bool time_invariant = false;  // b does not depend on t (lets solvers
                                // cache coefficient sweeps)

  static DriftSpec zero(double gamma);
  static DriftSpec constant(double value, double gamma);
  // b(t,x) = K (0.6 + 0.4 cos(x + t)); oscillatory but bounded away from 0
  static DriftSpec bounded_oscillatory(double K, double gamma);

  void validate() const;
  /// Full first-order coefficient b(t,x)/|x|^gamma.
  double coeff(double t, double x) const;
};

/// Resolution of the chain field tables and their internal quadratures.
/// scaled(f) returns a copy with all node counts scaled by f (>= 1 keeps
/// minimums); used for the doubled-rule validation mode.
struct ChainAccuracy {
  int slices = 26;                // time slices per tabulated field
  int xi_nodes = 25;              // peak-following nodes per slice
  int global_nodes = 24;          // extent-covering nodes per slice
  int time_panels_per_side = 6;   // graded panels for inner time integrals
  int time_nodes_per_panel = 5;
  double time_grading = 0.22;
  int space_nodes_per_panel = 5;  // inner space quadrature (per panel)
  int space_panels = 5;
  int eval_time_panels_per_side = 8;   // final per-point evaluation rules
  int eval_time_nodes_per_panel = 6;
  int eval_space_nodes_per_panel = 10;

  /// All node counts scaled by f (table grid by sqrt f); keeps minimums.
  ChainAccuracy scaled(double f) const;
  /// Quadrature node counts scaled by f; the table layout is interpolation
  /// resolution rather than quadrature and stays fixed.
  ChainAccuracy quadrature_scaled(double f) const;
};

struct NeumannConfig {
  int max_order = 4;            // M
  double tail_tolerance = 1e-3;
  double delta = 0.5;           // splitting parameter for the tail bound
  SpaceRule space_rule;         // reference rules for direct convolutions
  TimeRule time_rule{0.75, 0.75, 48};
  ChainAccuracy chain;

  void validate() const;
  /// Convenience: copy with both reference rules and chain resolution
  /// scaled by f (validation mode uses f = 2).
  NeumannConfig scaled(double f) const;
};

struct NeumannResult {
  double value_p = 0.0;
  double leading_Z = 0.0;
  std::vector<double> terms;     // Z*Phi_m, m = 1..truncation_order
  int truncation_order = 0;
  double analytic_tail_bound = 0.0;
  bool tail_certified = false;   // tail bound finite and below tolerance
};

/// Phi1(t,x,s,y) = (b(t,x)/|x|^gamma) dZ_dx(t-s, x-y).  Throws at x = 0.
double phi1(const SpaceTimePair& pair, const DriftSpec& drift);

/// Phi_m by direct nested convolution Phi_m = Phi1 * Phi_{m-1}; intended
/// for cross-checks at small m (cost grows geometrically with m).
double phi_m(int m, const SpaceTimePair& pair, const DriftSpec& drift,
             const NeumannConfig& config);

/// Shared-work evaluator for sweeps of p(t,x,s,y) with one pair of
/// arguments pinned.
///
/// Anchor::Target pins (t,x): build once, then evaluate(s', y') for any
/// s' in [s_far, t) and any y'.  Used for mass integrals in y and for the
/// first factor of Chapman-Kolmogorov products.
///
/// Anchor::Source pins (s,y): build once, then evaluate(t', x') for any
/// t' in (s, t_far] and any x'.  Used for PDE-residual stencils and
/// x-sweeps.
class KernelChain {
 public:
  enum class Anchor { Target, Source };

  KernelChain(Anchor anchor, double anchor_time, double anchor_space,
              double far_time, const DriftSpec& drift,
              const NeumannConfig& config);
  ~KernelChain();
  KernelChain(KernelChain&&) noexcept;
  KernelChain& operator=(KernelChain&&) noexcept;

  NeumannResult evaluate(double time_pt, double space_pt) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot evaluation of p(t,x,s,y).
NeumannResult fundamental_solution(const SpaceTimePair& pair,
                                   const DriftSpec& drift,
                                   const NeumannConfig& config);

struct InitialData {
  std::function<double(double)> f;
  double W0 = 1.0;  // |f(y)| <= W0 (1+|y|)^W
  double W = 0.0;
};

/// u(t,x) = int p(t,x,s,y) f(y) dy with growth-aware truncation radius.
double solve_cauchy(double t, double x, double s, const InitialData& f,
                    const DriftSpec& drift, const NeumannConfig& config);

/// u(t,x) = int_s^t dtheta int p(t,x,theta,y) g(theta,y) dy, zero initial
/// condition; g bounded on the strip.
double solve_nonhomogeneous(double t, double x, double s,
                            const std::function<double(double, double)>& g,
                            const DriftSpec& drift,
                            const NeumannConfig& config);

}  // namespace parakern

#endif
