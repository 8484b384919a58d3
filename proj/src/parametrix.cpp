#include "parakern/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parakern/bounds.hpp"
#include "parakern/quadrature.hpp"

namespace parakern {

DriftSpec DriftSpec::zero(double gamma) {
  DriftSpec d;
  d.b = [](double, double) { return 0.0; };
  d.gamma = gamma;
  d.K = 0.0;
  d.time_invariant = true;
  return d;
}

DriftSpec DriftSpec::constant(double value, double gamma) {
  DriftSpec d;
  d.b = [value](double, double) { return value; };
  d.gamma = gamma;
  d.K = std::fabs(value);
  d.K_minus = value > 0.0 ? value : 0.0;
  d.time_invariant = true;
  return d;
}

DriftSpec DriftSpec::bounded_oscillatory(double K, double gamma) {
  DriftSpec d;
  d.b = [K](double t, double x) { return K * (0.6 + 0.4 * std::cos(x + t)); };
  d.gamma = gamma;
  d.K = K;
  d.K_minus = 0.2 * K;
  return d;
}

void DriftSpec::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::domain_error("DriftSpec: gamma must be in (0,1)");
  if (!(K >= 0.0)) throw std::domain_error("DriftSpec: K must be >= 0");
  if (!b) throw std::domain_error("DriftSpec: coefficient not set");
  if (K_minus < 0.0)
    throw std::domain_error("DriftSpec: K_minus must be >= 0");
}

double DriftSpec::coeff(double t, double x) const {
  return b(t, x) * std::pow(std::fabs(x), -gamma);
}

namespace {

int scaled_count(int n, double f, int floor_n) {
  return std::max(floor_n, (int)std::lround(n * f));
}

}  // namespace

ChainAccuracy ChainAccuracy::scaled(double f) const {
  ChainAccuracy c = *this;
  const double sf = std::sqrt(f);
  c.slices = scaled_count(slices, sf, 8);
  c.xi_nodes = scaled_count(xi_nodes, sf, 12);
  c.global_nodes = scaled_count(global_nodes, sf, 12);
  c.time_nodes_per_panel = scaled_count(time_nodes_per_panel, f, 3);
  c.space_nodes_per_panel = scaled_count(space_nodes_per_panel, f, 4);
  c.eval_time_nodes_per_panel = scaled_count(eval_time_nodes_per_panel, f, 4);
  c.eval_space_nodes_per_panel = scaled_count(eval_space_nodes_per_panel, f, 6);
  return c;
}

void NeumannConfig::validate() const {
  if (max_order < 1)
    throw std::domain_error("NeumannConfig: max_order must be >= 1");
  if (!(tail_tolerance > 0.0))
    throw std::domain_error("NeumannConfig: tail_tolerance must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("NeumannConfig: delta must be in (0,1)");
  time_rule.validate();
  if (chain.slices < 4 || chain.xi_nodes < 8 || chain.global_nodes < 8)
    throw std::domain_error("NeumannConfig: chain resolution too coarse");
}

ChainAccuracy ChainAccuracy::quadrature_scaled(double f) const {
  // scales only the integration rules; the interpolation table layout is a
  // representation choice, not a quadrature resolution, and stays fixed
  ChainAccuracy c = *this;
  c.time_nodes_per_panel = scaled_count(time_nodes_per_panel, f, 3);
  c.space_nodes_per_panel = scaled_count(space_nodes_per_panel, f, 4);
  c.eval_time_nodes_per_panel = scaled_count(eval_time_nodes_per_panel, f, 4);
  c.eval_space_nodes_per_panel = scaled_count(eval_space_nodes_per_panel, f, 6);
  return c;
}

NeumannConfig NeumannConfig::scaled(double f) const {
  NeumannConfig c = *this;
  c.space_rule.nodes_per_panel = scaled_count(space_rule.nodes_per_panel, f, 4);
  c.space_rule.panels = scaled_count(space_rule.panels, f, 4);
  c.time_rule.nodes = scaled_count(time_rule.nodes, f, 8);
  c.chain = chain.quadrature_scaled(f);
  return c;
}

double phi1(const SpaceTimePair& pair, const DriftSpec& drift) {
  drift.validate();
  if (pair.x == 0.0) throw std::domain_error("phi1: singular point x = 0");
  return drift.coeff(pair.t, pair.x) * dZ_dx(pair);
}

double phi_m(int m, const SpaceTimePair& pair, const DriftSpec& drift,
             const NeumannConfig& config) {
  if (m < 1) throw std::domain_error("phi_m: m must be >= 1");
  if (pair.x == 0.0) throw std::domain_error("phi_m: singular point x = 0");
  config.validate();
  if (m == 1) return phi1(pair, drift);
  SpaceRule sr = config.space_rule;
  sr.gamma = drift.gamma;
  TimeRule tr = config.time_rule;
  // shrink the rules at deeper recursion levels to keep cost geometric
  std::function<double(int, double, double, double, double)> rec =
      [&](int order, double t, double x, double s, double y) -> double {
    const SpaceTimePair p(t, x, s, y);
    if (order == 1) return phi1(p, drift);
    SpaceRule srl = sr;
    TimeRule trl = tr;
    const double shrink = std::pow(0.55, m - order + 1);
    srl.nodes_per_panel = scaled_count(sr.nodes_per_panel, shrink, 4);
    srl.panels = scaled_count(sr.panels, shrink, 4);
    trl.nodes = scaled_count(tr.nodes, shrink, 8);
    return convolve(
        [&](double tt, double xx, double ss, double yy) {
          return phi1(SpaceTimePair(tt, xx, ss, yy), drift);
        },
        [&](double tt, double xx, double ss, double yy) {
          return rec(order - 1, tt, xx, ss, yy);
        },
        p, srl, trl);
  };
  return rec(m, pair.t, pair.x, pair.s, pair.y);
}

// ---------------------------------------------------------------------------
// Field tables.

namespace {

// A per-order field F(h, w) where h is the distance to the anchor time and
// the field concentrates around anchor_space with width sqrt(h) as h -> 0.
// Slices are geometric in h; queries interpolate cubically in ln h across
// slices and cubically in w within each slice.
struct Field2D {
  double anchor_space = 0.0;
  double H = 0.0;     // time span; slice i has h_i = H * q^{L-1-i}
  double hmin = 0.0;
  int L = 0;
  double ln_q = 0.0;  // log of the slice ratio (negative)
  std::vector<std::vector<double>> nodes;  // per-slice sorted positions
  std::vector<std::vector<double>> vals;

  double slice_h(int i) const { return H * std::exp(ln_q * (L - 1 - i)); }

  double slice_value(int i, double w) const {
    const std::vector<double>& zs = nodes[i];
    const std::vector<double>& vv = vals[i];
    if (w <= zs.front() || w >= zs.back()) return 0.0;
    std::size_t j =
        std::upper_bound(zs.begin(), zs.end(), w) - zs.begin() - 1;
    // 4-point Lagrange around the bracket; never let the stencil straddle
    // the origin, where the field has a power-law kink
    std::size_t j0 = (j == 0) ? 0 : j - 1;
    if (j0 + 3 >= zs.size()) j0 = zs.size() - 4;
    if (w > 0.0) {
      while (j0 + 3 < zs.size() - 1 && zs[j0] < 0.0) ++j0;
    } else if (w < 0.0) {
      while (j0 > 0 && zs[j0 + 3] > 0.0) --j0;
    }
    // Lagrange in eta = sign(v) sqrt|v|: one-sided, this renders the
    // field's origin expansion a + b|v|^{1/2} + c|v| + d|v|^{3/2} exactly
    // cubic, and away from the origin it is a harmless reparametrization.
    auto eta = [](double v) { return v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v); };
    const double ew = eta(w);
    double acc = 0.0;
    for (std::size_t a = j0; a < j0 + 4; ++a) {
      double lag = 1.0;
      const double ea = eta(zs[a]);
      for (std::size_t c = j0; c < j0 + 4; ++c)
        if (c != a) lag *= (ew - eta(zs[c])) / (ea - eta(zs[c]));
      acc += lag * vv[a];
    }
    return acc;
  }

  double eval(double h, double w) const {
    if (!(h > hmin)) return 0.0;
    if (h > H) h = H;
    // fractional slice index: h = H exp(ln_q (L-1-i))
    double fi = (L - 1) - std::log(h / H) / ln_q;
    int im = (int)std::floor(fi);
    int i0 = std::min(std::max(im - 1, 0), L - 4);
    const double lh = std::log(h);
    double lhs[4], fv[4];
    for (int a = 0; a < 4; ++a) {
      const int i = i0 + a;
      lhs[a] = std::log(slice_h(i));
      fv[a] = slice_value(i, w);
    }
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double lag = 1.0;
      for (int c = 0; c < 4; ++c)
        if (c != a) lag *= (lh - lhs[c]) / (lhs[a] - lhs[c]);
      acc += lag * fv[a];
    }
    return acc;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// KernelChain.

struct KernelChain::Impl {
  Anchor anchor;
  double anchor_time;
  double anchor_space;
  double far_time;
  DriftSpec drift;
  NeumannConfig cfg;
  double H;        // |far_time - anchor_time|
  double lo, hi;   // space extent of the tables
  bool trivial;    // zero drift: p = Z exactly
  std::vector<Field2D> fields;  // order k field at index k-1

  Impl(Anchor a, double at, double asp, double ft, const DriftSpec& d,
       const NeumannConfig& c)
      : anchor(a), anchor_time(at), anchor_space(asp), far_time(ft), drift(d),
        cfg(c) {
    drift.validate();
    cfg.validate();
    if (anchor == Anchor::Target) {
      if (!(far_time < anchor_time))
        throw std::domain_error("KernelChain: need far_time < t for Target anchor");
    } else {
      if (!(far_time > anchor_time))
        throw std::domain_error("KernelChain: need far_time > s for Source anchor");
    }
    H = std::fabs(far_time - anchor_time);
    trivial = (drift.K == 0.0);
    const double pad = 8.0 * std::sqrt(H) + drift.K * H + 0.1;
    lo = std::min(anchor_space, 0.0) - pad;
    hi = std::max(anchor_space, 0.0) + pad;
    if (!trivial && cfg.max_order >= 2) build_tables();
  }

  // physical time of a slice/quadrature offset h from the anchor
  double phys_time(double h) const {
    return anchor == Anchor::Target ? anchor_time - h : anchor_time + h;
  }

  // base field (order 0) at offset h from the anchor:
  //   Target: Z(h, x - v);  Source: dZ_dx(h, v - y)
  double base_field(double h, double v) const {
    return anchor == Anchor::Target ? Z(h, anchor_space - v)
                                    : dZ_dx(h, v - anchor_space);
  }

  double field_at(int order, double h, double v) const {
    return order == 0 ? base_field(h, v) : fields[order - 1].eval(h, v);
  }

  std::vector<double> make_slice_nodes(double h, const ChainAccuracy& acc) const {
    std::vector<double> pts;
    pts.reserve(acc.xi_nodes + acc.global_nodes + 16);
    const double sh = std::sqrt(h);
    const int nxi = acc.xi_nodes | 1;  // odd count: a node sits on the peak
    for (int i = 0; i < nxi; ++i) {
      // graded toward the center, where the field curvature peaks
      const double u = -1.0 + 2.0 * i / (nxi - 1);
      const double xi = 8.0 * u * (0.4 + 0.6 * u * u);
      pts.push_back(anchor_space + xi * sh);
    }
    for (int i = 0; i < acc.global_nodes; ++i)
      pts.push_back(lo + (hi - lo) * i / (acc.global_nodes - 1));
    // cluster near the coefficient singularity at the origin; the field has
    // a |w|-power kink there, so interpolation needs dense one-sided support
    const double sH = std::sqrt(H);
    static const double kCluster[] = {0.012, 0.02, 0.032, 0.05, 0.08, 0.12,
                                      0.18, 0.27, 0.4,   0.6,  0.85};
    pts.push_back(0.0);
    for (double c : kCluster) {
      pts.push_back(c * sH);
      pts.push_back(-c * sH);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    const double tol = 1e-9 * (hi - lo);
    for (double p : pts) {
      if (p < lo || p > hi) continue;
      if (out.empty() || p - out.back() > tol) out.push_back(p);
    }
    return out;
  }

  // One recursion-step integral: given the previous-order field, compute
  //   integral over (0, hmax) dh' integral dv kernel(h', v) prev(h_prev(h'), v)
  // where the roles of the kernel and the time bookkeeping depend on the
  // anchor orientation.  Implemented separately at the two call sites for
  // clarity; this helper does the inner space integral for one time node.
  //
  // Target anchor, building order k at (rho = t - h_l, w):
  //   integral_{rho}^{t} dsig integral dv a_{k-1}(t - sig, v) cof(sig, v)
  //                                     dZ_dx(sig - rho, v - w)
  // Source anchor, building order k at (r = s + h_l, z), derivative kernel:
  //   integral_{s}^{r} drho integral dv dZ_dx(r - rho, z - v) cof(rho, v)
  //                                     g_{k-1}(rho - s, v)

  double table_point(int order, double h_slice, double w,
                     const TimeNodes& tn, const SpaceRule& sr) const {
    std::vector<double> tc(tn.size());
    for (std::size_t it = 0; it < tn.size(); ++it) {
      // tn.r holds offsets u in (0, h_slice) measured from the anchor-far
      // side of the sub-interval; translate per orientation below.
      const double u = tn.r[it];
      double sig_near, sig_far, tker, tprev, hprev;
      if (anchor == Anchor::Target) {
        // sig = t - u: kernel width sqrt(sig - rho) = sqrt(h_slice - u)
        const double sig = anchor_time - u;
        tker = h_slice - u;   // sig - rho
        hprev = u;            // t - sig
        tprev = sig;
        sig_near = std::sqrt(tker);
        sig_far = std::sqrt(std::max(hprev, 1e-300));
      } else {
        // rho = s + u: kernel width sqrt(r - rho) = sqrt(h_slice - u)
        const double rho = anchor_time + u;
        tker = h_slice - u;   // r - rho
        hprev = u;            // rho - s
        tprev = rho;
        sig_near = std::sqrt(tker);
        sig_far = std::sqrt(std::max(hprev, 1e-300));
      }
      double zlo, zhi, split;
      detail::convolution_extent(w, anchor_space, sig_near, sig_far, sr, zlo,
                                 zhi, split);
      const GaussianFeature feats[2] = {{w, sig_near}, {anchor_space, sig_far}};
      const double inner = integrate_space_singular(
          [&](double v) {
            const double cof = drift.coeff(tprev, v);
            if (anchor == Anchor::Target)
              return field_at(order - 1, hprev, v) * cof * dZ_dx(tker, v - w);
            return dZ_dx(tker, w - v) * cof * field_at(order - 1, hprev, v);
          },
          drift.gamma, sr, feats, zlo, zhi, split);
      tc[it] = tn.w[it] * inner;
    }
    return pairwise_sum(tc);
  }

  void build_tables() {
    const ChainAccuracy& acc = cfg.chain;
    const int L = acc.slices;
    const double hmin_frac = 1e-5;
    for (int k = 1; k <= cfg.max_order - 1; ++k) {
      const ChainAccuracy acck = acc.scaled(std::pow(0.75, k - 1));
      Field2D f;
      f.anchor_space = anchor_space;
      f.H = H;
      f.hmin = hmin_frac * H;
      f.L = L;
      f.ln_q = std::log(hmin_frac) / (L - 1);
      f.nodes.resize(L);
      f.vals.resize(L);
      SpaceRule sr;
      sr.gamma = drift.gamma;
      sr.panels = acck.space_panels;
      sr.nodes_per_panel = acck.space_nodes_per_panel;
      // flatten (slice, node) points for a balanced parallel loop
      std::vector<TimeNodes> tns(L);
      for (int l = 0; l < L; ++l) {
        f.nodes[l] = make_slice_nodes(f.slice_h(l), acck);
        f.vals[l].assign(f.nodes[l].size(), 0.0);
        // offsets u in (0, h_l), graded toward both ends
        build_time_nodes_graded(acck.time_panels_per_side,
                                acck.time_nodes_per_panel, acck.time_grading,
                                0.0, f.slice_h(l), tns[l]);
      }
      std::vector<std::pair<int, int>> work;
      for (int l = 0; l < L; ++l)
        for (std::size_t j = 0; j < f.nodes[l].size(); ++j)
          work.emplace_back(l, (int)j);
      // exceptions must not unwind through the parallel region
      std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic, 8)
      for (std::ptrdiff_t wi = 0; wi < (std::ptrdiff_t)work.size(); ++wi) {
        try {
          const int l = work[wi].first, j = work[wi].second;
          f.vals[l][j] =
              table_point(k, f.slice_h(l), f.nodes[l][j], tns[l], sr);
        } catch (...) {
#pragma omp critical
          if (!eptr) eptr = std::current_exception();
        }
      }
      if (eptr) std::rethrow_exception(eptr);
      fields.push_back(std::move(f));
    }
  }

  // term of order m at the free point; time_pt/space_pt per orientation
  double term_value(int m, double time_pt, double space_pt) const {
    const ChainAccuracy& acc = cfg.chain;
    SpaceRule sr;
    sr.gamma = drift.gamma;
    sr.panels = acc.space_panels;
    sr.nodes_per_panel = acc.eval_space_nodes_per_panel;
    const double span = std::fabs(anchor_time - time_pt);
    TimeNodes tn;
    build_time_nodes_graded(acc.eval_time_panels_per_side,
                            acc.eval_time_nodes_per_panel, acc.time_grading,
                            0.0, span, tn);
    std::vector<double> tc(tn.size());
    for (std::size_t it = 0; it < tn.size(); ++it) {
      const double u = tn.r[it];  // offset from the free point toward anchor
      double inner;
      if (anchor == Anchor::Target) {
        // rho = s' + u; kernel dZ_dx(rho - s', v - y'); field a_{m-1}(t-rho, v)
        const double rho = time_pt + u;
        const double hprev = anchor_time - rho;
        const double sigk = std::sqrt(u), sigf = std::sqrt(std::max(hprev, 1e-300));
        double zlo, zhi, split;
        detail::convolution_extent(anchor_space, space_pt, sigf, sigk, sr, zlo,
                                   zhi, split);
        const GaussianFeature feats[2] = {{anchor_space, sigf},
                                          {space_pt, sigk}};
        inner = integrate_space_singular(
            [&](double v) {
              return field_at(m - 1, hprev, v) * drift.coeff(rho, v) *
                     dZ_dx(u, v - space_pt);
            },
            drift.gamma, sr, feats, zlo, zhi, split);
      } else {
        // rho = t' - u; kernel Z(t'-rho, x'-v); field g_{m-1}(rho - s, v)
        const double rho = time_pt - u;
        const double hprev = rho - anchor_time;
        if (!(hprev > 0.0)) { tc[it] = 0.0; continue; }
        const double sigk = std::sqrt(u), sigf = std::sqrt(hprev);
        double zlo, zhi, split;
        detail::convolution_extent(space_pt, anchor_space, sigk, sigf, sr, zlo,
                                   zhi, split);
        const GaussianFeature feats[2] = {{space_pt, sigk},
                                          {anchor_space, sigf}};
        inner = integrate_space_singular(
            [&](double v) {
              return Z(u, space_pt - v) * drift.coeff(rho, v) *
                     field_at(m - 1, hprev, v);
            },
            drift.gamma, sr, feats, zlo, zhi, split);
      }
      tc[it] = tn.w[it] * inner;
    }
    return pairwise_sum(tc);
  }

  NeumannResult do_evaluate(double time_pt, double space_pt) const {
    SpaceTimePair pair = (anchor == Anchor::Target)
                             ? SpaceTimePair(anchor_time, anchor_space,
                                             time_pt, space_pt)
                             : SpaceTimePair(time_pt, space_pt, anchor_time,
                                             anchor_space);
    NeumannResult res;
    res.leading_Z = Z(pair);
    res.value_p = res.leading_Z;
    if (trivial) {
      res.truncation_order = 0;
      res.analytic_tail_bound = 0.0;
      res.tail_certified = true;
      return res;
    }
    if (anchor == Anchor::Target) {
      if (!(time_pt >= far_time - 1e-12 && time_pt < anchor_time))
        throw std::domain_error("KernelChain::evaluate: s' outside [far_time, t)");
    } else {
      if (!(time_pt > anchor_time && time_pt <= far_time + 1e-12))
        throw std::domain_error("KernelChain::evaluate: t' outside (s, far_time]");
    }
    res.tail_certified = false;
    for (int m = 1; m <= cfg.max_order; ++m) {
      res.terms.push_back(term_value(m, time_pt, space_pt));
      res.truncation_order = m;
      res.analytic_tail_bound =
          neumann_series_tail(m, pair, drift, cfg.delta);
      if (res.analytic_tail_bound < cfg.tail_tolerance) {
        res.tail_certified = true;
        break;
      }
    }
    for (double t : res.terms) res.value_p += t;
    return res;
  }
};

KernelChain::KernelChain(Anchor anchor, double anchor_time, double anchor_space,
                         double far_time, const DriftSpec& drift,
                         const NeumannConfig& config)
    : impl_(new Impl(anchor, anchor_time, anchor_space, far_time, drift,
                     config)) {}

KernelChain::~KernelChain() = default;
KernelChain::KernelChain(KernelChain&&) noexcept = default;
KernelChain& KernelChain::operator=(KernelChain&&) noexcept = default;

NeumannResult KernelChain::evaluate(double time_pt, double space_pt) const {
  return impl_->do_evaluate(time_pt, space_pt);
}

NeumannResult fundamental_solution(const SpaceTimePair& pair,
                                   const DriftSpec& drift,
                                   const NeumannConfig& config) {
  if (drift.K == 0.0) {
    NeumannResult res;
    res.leading_Z = Z(pair);
    res.value_p = res.leading_Z;
    res.truncation_order = 0;
    res.analytic_tail_bound = 0.0;
    res.tail_certified = true;
    return res;
  }
  KernelChain chain(KernelChain::Anchor::Target, pair.t, pair.x, pair.s, drift,
                    config);
  return chain.evaluate(pair.s, pair.y);
}

// ---------------------------------------------------------------------------
// Cauchy / non-homogeneous solvers.

namespace {

double growth_truncation_radius(double W0, double W, double gamma, double tau,
                                double tol) {
  // smallest R with (1+R)^W exp(-(1-gamma) R^2 / (4 tau)) < tol / max(W0,1)
  double R = 8.0 * std::sqrt(tau);
  const double target = tol / std::max(W0, 1.0);
  for (int it = 0; it < 60; ++it) {
    const double v =
        std::pow(1.0 + R, W) * std::exp(-(1.0 - gamma) * R * R / (4.0 * tau));
    if (v < target) break;
    R *= 1.25;
  }
  return R;
}

}  // namespace

double solve_cauchy(double t, double x, double s, const InitialData& f,
                    const DriftSpec& drift, const NeumannConfig& config) {
  if (!(t > s)) throw std::domain_error("solve_cauchy: need t > s");
  if (!f.f) throw std::domain_error("solve_cauchy: initial function not set");
  if (!(f.W0 > 0.0) || f.W < 0.0)
    throw std::domain_error("solve_cauchy: growth parameters not declared");
  const double tau = t - s;
  const double R =
      growth_truncation_radius(f.W0, f.W, drift.gamma, tau, config.tail_tolerance);
  // y-quadrature: p(t,x,s,.) carries a |y|^{1-gamma} crease at the origin,
  // so use the singularity-adapted node builder rather than plain panels
  SpaceRule yr;
  yr.gamma = drift.gamma;
  yr.panels = 6;
  yr.nodes_per_panel = 12;
  const double split = std::min(std::sqrt(tau), 0.25 * R);
  const double lo = std::min(x - R, -split), hi = std::max(x + R, split);
  const GaussianFeature feats[1] = {{x, std::sqrt(tau)}};
  SpaceNodes nodes;
  build_space_nodes(drift.gamma, yr, feats, lo, hi, split, nodes);
  std::vector<double> contrib(nodes.size(), 0.0);
  if (drift.K == 0.0) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      contrib[i] = nodes.w[i] * Z(tau, x - nodes.z[i]) * f.f(nodes.z[i]);
    return pairwise_sum(contrib);
  }
  KernelChain chain(KernelChain::Anchor::Target, t, x, s, drift, config);
  std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)nodes.size(); ++i) {
    try {
      contrib[i] = nodes.w[i] * chain.evaluate(s, nodes.z[i]).value_p *
                   f.f(nodes.z[i]);
    } catch (...) {
#pragma omp critical
      if (!eptr) eptr = std::current_exception();
    }
  }
  if (eptr) std::rethrow_exception(eptr);
  return pairwise_sum(contrib);
}

double solve_nonhomogeneous(double t, double x, double s,
                            const std::function<double(double, double)>& g,
                            const DriftSpec& drift,
                            const NeumannConfig& config) {
  if (!(t > s)) throw std::domain_error("solve_nonhomogeneous: need t > s");
  if (!g) throw std::domain_error("solve_nonhomogeneous: source not set");
  TimeNodes tn;
  build_time_nodes_graded(5, 6, 0.3, s, t, tn);
  std::unique_ptr<KernelChain> chain;
  if (drift.K != 0.0)
    chain.reset(new KernelChain(KernelChain::Anchor::Target, t, x, s, drift,
                                config));
  std::vector<double> tc(tn.size());
  SpaceRule yr;
  yr.gamma = drift.gamma;
  yr.panels = 6;
  yr.nodes_per_panel = 10;
  for (std::size_t it = 0; it < tn.size(); ++it) {
    const double theta = tn.r[it];
    const double w = std::sqrt(t - theta);
    const double R = 8.0 * w + drift.K * (t - theta) + 1e-3;
    // same origin crease as in solve_cauchy
    const double split = std::min(w, 0.25 * R);
    const double lo = std::min(x - R, -split), hi = std::max(x + R, split);
    const GaussianFeature feats[1] = {{x, w}};
    SpaceNodes nodes;
    build_space_nodes(drift.gamma, yr, feats, lo, hi, split, nodes);
    std::vector<double> contrib(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double y = nodes.z[i];
      const double p = (drift.K == 0.0) ? Z(t - theta, x - y)
                                        : chain->evaluate(theta, y).value_p;
      contrib[i] = nodes.w[i] * p * g(theta, y);
    }
    tc[it] = tn.w[it] * pairwise_sum(contrib);
  }
  return pairwise_sum(tc);
}

}  // namespace parakern
