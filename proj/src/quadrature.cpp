#include "parakern/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "parakern/special_functions.hpp"

namespace parakern {

void SpaceRule::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::domain_error("SpaceRule: gamma must be in [0,1)");
  if (!(truncation_radius_multiplier > 0.0))
    throw std::domain_error("SpaceRule: truncation radius must be positive");
  if (panels < 2 || nodes_per_panel < 2)
    throw std::domain_error("SpaceRule: need at least 2 panels and 2 nodes");
}

void TimeRule::validate() const {
  if (!(exponent_left < 1.0) || !(exponent_right < 1.0))
    throw std::domain_error("TimeRule: endpoint exponents must be < 1");
  if (nodes < 2) throw std::domain_error("TimeRule: need at least 2 nodes");
}

// ---------------------------------------------------------------------------
// Gauss-Legendre via Newton iteration on P_n.

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P'_n(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

std::mutex g_gl_mutex;
std::map<int, GaussRule> g_gl_cache;

// Symmetric tridiagonal QL with implicit shifts; eigenvalues in d, first
// components of the normalized eigenvectors in q (q starts as e_1).
void tridiag_eigen_first_row(std::vector<double>& d, std::vector<double>& e,
                             std::vector<double>& q) {
  const int n = static_cast<int>(d.size());
  e.push_back(0.0);  // e[i] couples i and i+1; e[n-1] sentinel
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("tridiag_eigen: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          // rotate the tracked eigenvector row
          f = q[i + 1];
          q[i + 1] = s * q[i] + c * f;
          q[i] = c * q[i] - s * f;
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

GaussRule make_gauss_jacobi01(int n, double a, double b) {
  // weight (1-u)^{-a} u^{-b} on (0,1); on (-1,1) this is the Jacobi weight
  // with alpha = -a, beta = -b (both > -1 since a,b < 1).
  const double al = -a, be = -b;
  std::vector<double> d(n), e;  // e[k] couples k,k+1 (k = 0..n-2)
  e.resize(n - 1);
  d[0] = (be - al) / (al + be + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + al + be;
    d[k] = (be * be - al * al) / (s * (s + 2.0));
  }
  if (n > 1) {
    const double s = 2.0 + al + be;
    e[0] = std::sqrt(4.0 * (1.0 + al) * (1.0 + be) / (s * s * (3.0 + al + be)));
    for (int k = 2; k < n; ++k) {
      const double s2 = 2.0 * k + al + be;
      e[k - 1] = std::sqrt(4.0 * k * (k + al) * (k + be) * (k + al + be) /
                           (s2 * s2 * (s2 + 1.0) * (s2 - 1.0)));
    }
  }
  std::vector<double> q(n, 0.0);
  q[0] = 1.0;
  tridiag_eigen_first_row(d, e, q);
  // sort ascending by node
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
  const double mu0 = beta_fn(al + 1.0, be + 1.0);  // mass on (0,1)
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = 0.5 * (1.0 + d[idx[i]]);
    rule.w[i] = mu0 * q[idx[i]] * q[idx[i]];
  }
  return rule;
}

std::mutex g_gj_mutex;
std::map<std::tuple<int, double, double>, GaussRule> g_gj_cache;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  std::lock_guard<std::mutex> lock(g_gl_mutex);
  auto it = g_gl_cache.find(n);
  if (it == g_gl_cache.end())
    it = g_gl_cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

const GaussRule& gauss_jacobi01(int n, double a, double b) {
  if (n < 1) throw std::domain_error("gauss_jacobi01: n must be >= 1");
  if (!(a < 1.0 && b < 1.0))
    throw std::domain_error("gauss_jacobi01: exponents must be < 1");
  std::lock_guard<std::mutex> lock(g_gj_mutex);
  const auto key = std::make_tuple(n, a, b);
  auto it = g_gj_cache.find(key);
  if (it == g_gj_cache.end())
    it = g_gj_cache.emplace(key, make_gauss_jacobi01(n, a, b)).first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Space node builder.

namespace {

void append_gl_panel(const GaussRule& gl, double a, double b, SpaceNodes& out) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    out.z.push_back(c + h * gl.x[i]);
    out.w.push_back(h * gl.w[i]);
  }
}

// Panel inside the singular band: substitute z = sgn(w)|w|^{1/(1-gamma)},
// dz = |w|^{gamma/(1-gamma)}/(1-gamma) dw, with w-panels placed so that no
// node lands on w = 0.
void append_singular_panel(const GaussRule& gl, double gamma, double a,
                           double b, SpaceNodes& out) {
  auto fwd = [&](double z) {
    return (z >= 0 ? 1.0 : -1.0) * std::pow(std::fabs(z), 1.0 - gamma);
  };
  const double wa = fwd(a), wb = fwd(b);
  auto emit = [&](double w0, double w1) {
    if (!(w1 > w0)) return;
    const double h = 0.5 * (w1 - w0), c = 0.5 * (w0 + w1);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double w = c + h * gl.x[i];
      const double aw = std::fabs(w);
      const double z = (w >= 0 ? 1.0 : -1.0) * std::pow(aw, 1.0 / (1.0 - gamma));
      out.z.push_back(z);
      out.w.push_back(h * gl.w[i] * std::pow(aw, gamma / (1.0 - gamma)) /
                      (1.0 - gamma));
    }
  };
  if (wa < 0.0 && wb > 0.0) {
    emit(wa, 0.0);
    emit(0.0, wb);
  } else {
    emit(std::min(wa, wb), std::max(wa, wb));
  }
}

}  // namespace

void build_space_nodes(double gamma, const SpaceRule& rule,
                       std::span<const GaussianFeature> features, double lo,
                       double hi, double split, SpaceNodes& out) {
  rule.validate();
  out.clear();
  if (!(hi > lo)) throw std::domain_error("build_space_nodes: empty interval");
  const GaussRule& gl = gauss_legendre(rule.nodes_per_panel);
  const double span = hi - lo;
  const bool singular = gamma > 0.0 && split > 0.0 && lo < split && hi > -split;

  // breakpoints: interval ends, singular band edges, geometric ladder away
  // from the band, and a sigma-ladder around each Gaussian feature.
  std::vector<double> brk = {lo, hi};
  const double band = singular ? split : 0.0;
  if (singular) {
    if (-split > lo) brk.push_back(-split);
    if (split < hi) brk.push_back(split);
  }
  const double maxabs = std::max(std::fabs(lo), std::fabs(hi));
  if (band > 0.0 && maxabs > band) {
    int ngeo = std::max(2, rule.panels / 2);
    double ratio = std::pow(maxabs / band, 1.0 / ngeo);
    if (ratio < 1.5) ratio = 1.5;
    for (double p = band * ratio; p < maxabs; p *= ratio) {
      if (p < hi) brk.push_back(p);
      if (-p > lo) brk.push_back(-p);
    }
  } else if (!singular) {
    // no band: mildly graded uniform skeleton
    const int np = std::max(2, rule.panels / 2);
    for (int k = 1; k < np; ++k) brk.push_back(lo + span * k / np);
  }
  static const double kSigmaLadder[] = {-6, -4, -2, -1, 0, 1, 2, 4, 6};
  for (const auto& f : features) {
    if (!(f.sigma > 1e-300)) continue;
    for (double k : kSigmaLadder) {
      const double p = f.center + k * f.sigma;
      if (p > lo && p < hi && std::fabs(p) > band) brk.push_back(p);
    }
  }
  std::sort(brk.begin(), brk.end());
  const double tol = 1e-12 * std::max(span, 1.0);
  std::vector<double> edges;
  for (double p : brk)
    if (edges.empty() || p - edges.back() > tol) edges.push_back(p);
  if (edges.back() < hi) edges.back() = hi;

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double mid = 0.5 * (a + b);
    if (singular && std::fabs(mid) < split * (1.0 + 1e-12))
      append_singular_panel(gl, gamma, a, b, out);
    else
      append_gl_panel(gl, a, b, out);
  }
}

// ---------------------------------------------------------------------------
// Time node builders.

void build_time_nodes(const TimeRule& rule, double s, double t, TimeNodes& out) {
  rule.validate();
  if (!(t > s)) throw std::domain_error("build_time_nodes: need t > s");
  out.clear();
  const GaussRule& gj =
      gauss_jacobi01(rule.nodes, rule.exponent_left, rule.exponent_right);
  const double tau = t - s;
  out.r.resize(gj.x.size());
  out.w.resize(gj.x.size());
  for (std::size_t i = 0; i < gj.x.size(); ++i) {
    const double u = gj.x[i];
    out.r[i] = s + u * tau;
    out.w[i] = tau * gj.w[i] * std::pow(1.0 - u, rule.exponent_left) *
               std::pow(u, rule.exponent_right);
  }
}

void build_time_nodes_graded(int panels_per_side, int nodes_per_panel,
                             double grading, double s, double t,
                             TimeNodes& out) {
  if (panels_per_side < 1 || nodes_per_panel < 2)
    throw std::domain_error("build_time_nodes_graded: bad panel counts");
  if (!(grading > 0.0 && grading < 1.0))
    throw std::domain_error("build_time_nodes_graded: grading must be in (0,1)");
  if (!(t > s)) throw std::domain_error("build_time_nodes_graded: need t > s");
  out.clear();
  const GaussRule& gl = gauss_legendre(nodes_per_panel);
  const double h = 0.5 * (t - s);
  std::vector<double> edges;
  edges.push_back(s);
  for (int k = panels_per_side - 1; k >= 0; --k)
    edges.push_back(s + h * std::pow(grading, k));
  for (int k = 1; k < panels_per_side; ++k)
    edges.push_back(t - h * std::pow(grading, k));
  edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double hw = 0.5 * (b - a), c = 0.5 * (a + b);
    for (std::size_t j = 0; j < gl.x.size(); ++j) {
      out.r.push_back(c + hw * gl.x[j]);
      out.w.push_back(hw * gl.w[j]);
    }
  }
}

// ---------------------------------------------------------------------------

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

void convolution_extent(double x, double y, double sig1, double sig2,
                        const SpaceRule& rule, double& lo, double& hi,
                        double& split) {
  const double sig3 = std::sqrt(sig1 * sig1 + sig2 * sig2);
  const double L = std::max(std::fabs(x), std::fabs(y)) +
                   rule.truncation_radius_multiplier * sig3;
  lo = -L;
  hi = L;
  split = std::min(std::min(sig1, sig2), 0.5 * L);
  if (!(split > 0.0)) split = 0.0;
}

}  // namespace detail

}  // namespace parakern
