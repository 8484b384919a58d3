#ifndef PARAKERN_QUADRATURE_HPP
#define PARAKERN_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "parakern/gaussian.hpp"

// Deterministic quadrature engines for the kernel family of this library:
// space integrals with an |z|^{-gamma} origin singularity under Gaussian
// envelopes, and time integrals with Beta-type endpoint singularities.
// All rules are fixed (no adaptive randomness); node contributions are
// accumulated by pairwise summation in fixed node order, so results do
// not depend on evaluation order or thread count.

namespace parakern {

struct SpaceRule {
  double gamma = 0.0;                        // origin singularity exponent, in [0,1)
  double truncation_radius_multiplier = 8.0; // R in combined std devs
  int panels = 16;                           // outer panels (split across both sides)
  int nodes_per_panel = 24;

  void validate() const;
};

struct TimeRule {
  double exponent_left;   // singularity power at r = t, < 1
  double exponent_right;  // singularity power at r = s, < 1
  int nodes = 48;

  void validate() const;
};

/// Nodes/weights of an n-point rule; semantics depend on the producer.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre on (-1,1).  Cached, thread-safe.
const GaussRule& gauss_legendre(int n);

/// Gauss-Jacobi on (0,1) with weight (1-u)^{-a} u^{-b}, a,b < 1.
/// sum w_i h(u_i) ~ int_0^1 (1-u)^{-a} u^{-b} h(u) du.  Cached, thread-safe.
const GaussRule& gauss_jacobi01(int n, double a, double b);

/// A Gaussian envelope feature the node builder must resolve.
struct GaussianFeature {
  double center;
  double sigma;
};

/// Sampling nodes for a space integral: sum w_i f(z_i) ~ int_lo^hi f(z) dz,
/// valid for f with an integrable |z|^{-gamma} singularity at the origin
/// and Gaussian decay described by the features.
struct SpaceNodes {
  std::vector<double> z;
  std::vector<double> w;
  void clear() { z.clear(); w.clear(); }
  std::size_t size() const { return z.size(); }
};

/// Builds the panel decomposition: an inner region |z| <= split handled by
/// the substitution z = sign(w)|w|^{1/(1-gamma)}, outer panels graded
/// geometrically away from the split and refined around each feature.
void build_space_nodes(double gamma, const SpaceRule& rule,
                       std::span<const GaussianFeature> features, double lo,
                       double hi, double split, SpaceNodes& out);

/// Time integration nodes for int_s^t g(r) dr where g carries endpoint
/// singularities (t-r)^{-a} (r-s)^{-b} declared by the rule; weights absorb
/// the endpoint powers so callers pass the full integrand g.
struct TimeNodes {
  std::vector<double> r;
  std::vector<double> w;
  void clear() { r.clear(); w.clear(); }
  std::size_t size() const { return r.size(); }
};

void build_time_nodes(const TimeRule& rule, double s, double t, TimeNodes& out);

/// Composite Gauss-Legendre on panels graded geometrically toward both
/// endpoints; robust for integrands with boundary layers of unknown order.
void build_time_nodes_graded(int panels_per_side, int nodes_per_panel,
                             double grading, double s, double t,
                             TimeNodes& out);

/// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> v);

namespace detail {
/// Default extent for kernel-family integrands: both Gaussian features of
/// a convolution plus the origin, per the truncation rule of SpaceRule.
void convolution_extent(double x, double y, double sig1, double sig2,
                        const SpaceRule& rule, double& lo, double& hi,
                        double& split);
}  // namespace detail

/// int f(z) dz for f with the declared singularity/envelope structure.
template <class F>
double integrate_space_singular(F&& f, double gamma, const SpaceRule& rule,
                                std::span<const GaussianFeature> features,
                                double lo, double hi, double split) {
  SpaceNodes nodes;
  build_space_nodes(gamma, rule, features, lo, hi, split, nodes);
  std::vector<double> c(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    c[i] = nodes.w[i] * f(nodes.z[i]);
  return pairwise_sum(c);
}

/// int_s^t g(r) dr with the rule's declared endpoint powers.
template <class G>
double integrate_time_beta(G&& g, double s, double t, const TimeRule& rule) {
  TimeNodes nodes;
  build_time_nodes(rule, s, t, nodes);
  std::vector<double> c(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    c[i] = nodes.w[i] * g(nodes.r[i]);
  return pairwise_sum(c);
}

/// Two-dimensional kernel convolution
///   (f*g)(t,x,s,y) = int_s^t dr int_R f(t,x,r,z) g(r,z,s,y) dz
/// composed from the time and space engines.  f and g are callables of
/// (t,x,s,y).  Throws on non-finite inner integrals.
template <class F, class G>
double convolve(F&& f, G&& g, const SpaceTimePair& pair, const SpaceRule& sr,
                const TimeRule& tr) {
  auto inner = [&](double r) {
    const double sig1 = std::sqrt(pair.t - r);
    const double sig2 = std::sqrt(r - pair.s);
    double lo, hi, split;
    detail::convolution_extent(pair.x, pair.y, sig1, sig2, sr, lo, hi, split);
    const GaussianFeature feats[2] = {{pair.x, sig1}, {pair.y, sig2}};
    const double v = integrate_space_singular(
        [&](double z) { return f(pair.t, pair.x, r, z) * g(r, z, pair.s, pair.y); },
        sr.gamma, sr, feats, lo, hi, split);
    if (!std::isfinite(v))
      throw std::runtime_error("convolve: non-finite inner integral at r=" +
                               std::to_string(r));
    return v;
  };
  return integrate_time_beta(inner, pair.s, pair.t, tr);
}

}  // namespace parakern

#endif
