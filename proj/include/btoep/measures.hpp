#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/curves.hpp"
#include "btoep/errors.hpp"
#include "btoep/roots.hpp"
#include "btoep/symbol.hpp"

namespace btoep {

/// Weighted point masses; weights are nonnegative. spacing (when present)
/// is the local arclength cell width of each node, used by the energy
/// computations to resolve the logarithmic diagonal.
struct DiscreteMeasure {
  std::vector<cplx> points;
  std::vector<double> weights;
  std::vector<double> spacing;
  std::vector<int> arc;  // originating arc index; empty for point spectra

  double total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
  std::size_t size() const { return points.size(); }
  void append(cplx x, double w, double h, int arc_id = -1) {
    points.push_back(x);
    weights.push_back(w);
    spacing.push_back(h);
    arc.push_back(arc_id);
  }
};

struct DensitySample {
  cplx lambda;
  cplx complex_density;
  double real_density = 0.0;
};

namespace detail {

inline double branch_exclusion_radius(cplx bp) { return 1e-4 * (1.0 + std::abs(bp)); }

}  // namespace detail

/// Density of mu_k at a regular point lambda of Gamma_k with unit tangent
/// tangent: the jump of w_k'/w_k across the arc evaluated at two-sided
/// offsets lambda +- i eps tangent, multiplied by tangent/(2 pi i), with one
/// Richardson step over eps, eps/2. eps <= 0 selects the default
/// 1e-6 x (distance to the nearest branch point).
inline DensitySample density_at(const LaurentSymbol& a, int k, cplx lambda, cplx tangent,
                                double eps = 0.0) {
  double d_branch = std::numeric_limits<double>::infinity();
  for (cplx bp : branch_points(a)) d_branch = std::min(d_branch, std::abs(lambda - bp));
  for (cplx bp : branch_points(a))
    if (std::abs(lambda - bp) < detail::branch_exclusion_radius(bp))
      throw NearSingularity("density requested inside the branch-point exclusion radius");

  if (eps <= 0.0) eps = std::max(1e-6 * d_branch, 1e-8 * (1.0 + std::abs(lambda)));
  cplx tau = unitize(tangent);

  auto jump = [&](double e) -> cplx {
    cplx lp = w_logderiv(a, k, lambda + cplx(0.0, 1.0) * tau * e);
    cplx lm = w_logderiv(a, k, lambda - cplx(0.0, 1.0) * tau * e);
    return lp - lm;
  };

  // Both Richardson levels must share the same offset family: an unpaired
  // retry leaves the O(eps) smooth-field term uncancelled.
  cplx extrapolated;
  for (int attempt = 0;; ++attempt) {
    try {
      cplx j1 = jump(eps);
      cplx j2 = jump(0.5 * eps);
      extrapolated = 2.0 * j2 - j1;
      break;
    } catch (const OnCurve&) {
      if (attempt >= 3) throw;
      eps *= 3.0;  // offsets fell inside the tie tolerance band
    }
  }

  DensitySample out;
  out.lambda = lambda;
  out.complex_density = extrapolated * tau / (2.0 * pi * cplx(0.0, 1.0));
  out.real_density = out.complex_density.real();
  if (out.real_density < -1e-9 * std::max(1.0, std::abs(out.complex_density)))
    throw NegativeDensity("negative density: orientation or tracing inconsistency");
  return out;
}

namespace detail {

/// Arclength parametrization of a polyline arc.
struct ArcParam {
  const CurveArc* arc = nullptr;
  std::vector<double> s;  // cumulative arclength per sample

  explicit ArcParam(const CurveArc& a) : arc(&a) {
    s.resize(a.points.size());
    s[0] = 0.0;
    for (std::size_t i = 1; i < a.points.size(); ++i)
      s[i] = s[i - 1] + std::abs(a.points[i] - a.points[i - 1]);
  }
  double length() const { return s.back(); }

  cplx position(double t) const {
    t = std::clamp(t, 0.0, length());
    auto it = std::upper_bound(s.begin(), s.end(), t);
    std::size_t i = std::min(static_cast<std::size_t>(it - s.begin()),
                             s.size() - 1);
    if (i == 0) i = 1;
    double seg = s[i] - s[i - 1];
    double f = seg > 0.0 ? (t - s[i - 1]) / seg : 0.0;
    return arc->points[i - 1] + f * (arc->points[i] - arc->points[i - 1]);
  }
  cplx direction(double t) const {
    t = std::clamp(t, 0.0, length());
    auto it = std::upper_bound(s.begin(), s.end(), t);
    std::size_t i = std::min(static_cast<std::size_t>(it - s.begin()), s.size() - 1);
    if (i == 0) i = 1;
    return unitize(arc->points[i] - arc->points[i - 1]);
  }
};

/// Transversal re-projection of an interpolated polyline point onto the
/// actual curve before a density evaluation.
inline cplx project_to_curve(const LaurentSymbol& a, int k, cplx x, cplx tau, double window) {
  auto [sbest, val] = valley_min(
      [&](double t) { return modulus_gap(a, k, x + t * cplx(0.0, 1.0) * tau); }, -window, window,
      1e-12 * (1.0 + std::abs(x)), 1e-11);
  return x + sbest * cplx(0.0, 1.0) * tau;
}

/// Least-squares slope/intercept helper.
inline std::pair<double, double> line_fit(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

/// density_at with an escalation ladder for offsets stuck in the tie band
/// of shallow curves. When even the widest offset cannot separate the tied
/// moduli, the jump itself is below the tie resolution and the density is
/// returned as zero.
inline DensitySample density_with_retry(const LaurentSymbol& a, int k, cplx x, cplx tau) {
  const double ladder[] = {0.0, 1e-5, 1e-4};
  for (double f : ladder) {
    try {
      return density_at(a, k, x, tau, f * (1.0 + std::abs(x)));
    } catch (const OnCurve&) {
      continue;
    }
  }
  // the jump is below the tie resolution at every usable offset; the true
  // density there is bounded by tie_tol / (2 pi eps) and treated as zero
  DensitySample flat;
  flat.lambda = x;
  flat.complex_density = 0.0;
  flat.real_density = 0.0;
  return flat;
}

/// Density at arclength distance d from the chosen endpoint, projected onto
/// the curve first. Returns a negative value when not evaluable.
inline double density_near_endpoint(const LaurentSymbol& a, int k, const ArcParam& par,
                                    bool at_start, double d) {
  double t = at_start ? d : par.length() - d;
  cplx x = par.position(t);
  cplx tau = par.direction(t);
  x = project_to_curve(a, k, x, tau, 0.25 * d);
  try {
    return density_with_retry(a, k, x, tau).real_density;
  } catch (const Error&) {
    return -1.0;
  }
}

/// Log-log fit of the density against the distance to an endpoint, snapped
/// to a small candidate set of singularity orders. Candidates come from the
/// branch-point multiplicity (the singularity order is m/(m+1) when the
/// symbol has an (m+1)-fold root there); 0 and 1/2 cover the one-sided
/// cases where the bound is not attained. The probe window stays in the
/// near-endpoint asymptotic regime regardless of the arc length.
inline double endpoint_exponent(const LaurentSymbol& a, int k, const ArcParam& par, bool at_start,
                                cplx endpoint, const std::vector<double>& candidates) {
  double excl = branch_exclusion_radius(endpoint);
  double inner = 3.0 * excl;
  double outer = std::min(0.45 * par.length(), 0.01 * (1.0 + std::abs(endpoint)));
  if (!(inner < outer)) return 0.0;
  const int samples = 7;
  std::vector<double> lx, ly;
  for (int i = 0; i < samples; ++i) {
    double d = inner * std::pow(outer / inner, double(i) / (samples - 1));
    double rho = density_near_endpoint(a, k, par, at_start, d);
    if (rho > 0.0) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(rho));
    }
  }
  if (lx.size() < 3) return 0.0;
  double sigma = -line_fit(lx, ly).first;
  double best = 0.0, bestdist = std::abs(sigma);
  for (double cand : candidates) {
    if (std::abs(sigma - cand) < bestdist) {
      bestdist = std::abs(sigma - cand);
      best = cand;
    }
  }
  return best;
}

/// Local model rho ~ C d^{-sigma} + b d^{1-2 sigma} near an endpoint,
/// obtained by regressing rho d^sigma against d^{1-sigma}. Returns
/// {C, b}; C <= 0 flags an unusable fit.
inline std::pair<double, double> endpoint_prefactor(const LaurentSymbol& a, int k,
                                                    const ArcParam& par, bool at_start,
                                                    cplx endpoint, double sigma) {
  double excl = branch_exclusion_radius(endpoint);
  double inner = 1.3 * excl;
  double outer = std::min(25.0 * excl, 0.4 * par.length());
  if (!(inner < outer)) return {-1.0, 0.0};
  const int samples = 8;
  std::vector<double> xs, ys;
  for (int i = 0; i < samples; ++i) {
    double d = inner * std::pow(outer / inner, double(i) / (samples - 1));
    double rho = density_near_endpoint(a, k, par, at_start, d);
    if (rho > 0.0) {
      xs.push_back(std::pow(d, 1.0 - sigma));
      ys.push_back(rho * std::pow(d, sigma));
    }
  }
  if (xs.size() < 3) return {-1.0, 0.0};
  auto [slope, intercept] = line_fit(xs, ys);
  return {intercept, slope};
}

}  // namespace detail

struct QuadratureOptions {
  int nodes_per_arc = 256;
  double mass_tol = 0.02;       // validation threshold on the total mass
  double tail_radius_factor = 1e7;  // analytic tail extends to R * factor
};

/// Arclength quadrature of mu_k over a traced family: mesh graded toward
/// singular endpoints, analytic power-law stubs inside the branch-point
/// exclusion radius, and fitted O(|lambda|^{-1-delta}) tails past the
/// truncation circle.
inline DiscreteMeasure discretize_measure(const LaurentSymbol& a, int k, const CurveFamily& family,
                                          const QuadratureOptions& opts = {}) {
  DiscreteMeasure out;
  const double R = family.truncation_radius;

  int arc_id = -1;
  for (const CurveArc& arc : family.arcs) {
    ++arc_id;
    if (arc.points.size() < 2) continue;
    detail::ArcParam par(arc);
    const double S = par.length();
    if (!(S > 0.0)) continue;

    struct EndpointPlan {
      double sigma = 0.0;
      double cut = 0.0;  // arclength skipped next to the endpoint (stub region)
      bool truncated = false;
    };
    EndpointPlan plan[2];
    for (int side = 0; side < 2; ++side) {
      const ArcEndpoint& ep = side == 0 ? arc.begin : arc.end;
      if (ep.kind == EndpointKind::Truncation) {
        plan[side].truncated = true;
        continue;
      }
      std::vector<double> candidates = {0.0, 0.5};
      if (ep.kind == EndpointKind::BranchPoint) {
        for (const auto& [bp, mult] : branch_points_unique(a))
          if (std::abs(bp - ep.where) < 1e-6 * (1.0 + std::abs(bp)))
            candidates.push_back(double(mult) / double(mult + 1));
      } else {
        candidates.push_back(2.0 / 3.0);
      }
      plan[side].sigma = detail::endpoint_exponent(a, k, par, side == 0, ep.where, candidates);
      if (ep.kind == EndpointKind::BranchPoint)
        plan[side].cut =
            std::min(1.5 * detail::branch_exclusion_radius(ep.where), 0.2 * S);
    }

    // power-law stubs inside the exclusion radius of branch endpoints
    const int half_nodes = std::max(8, opts.nodes_per_arc / 2);
    for (int side = 0; side < 2; ++side) {
      if (!(plan[side].cut > 0.0)) continue;
      double cut = plan[side].cut;
      double sigma = plan[side].sigma;
      const ArcEndpoint& ep = side == 0 ? arc.begin : arc.end;
      auto [C, b] = detail::endpoint_prefactor(a, k, par, side == 0, ep.where, sigma);
      if (C <= 0.0) continue;
      // geometric subdivision of [0, cut] with exact two-term masses
      const int pieces = 10;
      for (int i = pieces; i >= 1; --i) {
        double hi2 = cut * std::pow(0.5, double(i - 1));
        double lo = i == pieces ? 0.0 : cut * std::pow(0.5, double(i));
        double mass = C * (std::pow(hi2, 1.0 - sigma) - std::pow(lo, 1.0 - sigma)) / (1.0 - sigma) +
                      b * (std::pow(hi2, 2.0 - 2.0 * sigma) - std::pow(lo, 2.0 - 2.0 * sigma)) /
                          (2.0 - 2.0 * sigma);
        if (!(mass > 0.0)) mass = 0.0;
        double mid = 0.5 * (lo + hi2);
        double t = side == 0 ? mid : S - mid;
        out.append(par.position(t), mass, hi2 - lo, arc_id);
      }
    }

    // graded composite midpoint over [cut0, S - cut1], split at the middle.
    // Power grading resolves endpoint singularities; long halves also get an
    // exponential warp so unit-scale structure at the inner end survives
    // a large truncation radius.
    double s_lo = plan[0].cut, s_hi = S - plan[1].cut;
    double mid = 0.5 * (s_lo + s_hi);
    for (int side = 0; side < 2; ++side) {
      double beta = 1.0 / (1.0 - plan[side].sigma);  // sigma in [0, 6/7]
      double len = side == 0 ? mid - s_lo : s_hi - mid;
      if (!(len > 0.0)) continue;
      const ArcEndpoint& ep = side == 0 ? arc.begin : arc.end;
      double local_scale = std::min(1.0 + std::abs(ep.where), len);
      double gamma = std::max(0.0, std::log(len / local_scale));
      auto warp = [&](double u) {
        double v = std::pow(u, beta);
        if (gamma < 0.7) return len * v;
        return len * std::expm1(gamma * v) / std::expm1(gamma);
      };
      for (int i = 0; i < half_nodes; ++i) {
        double u0 = double(i) / half_nodes, u1 = double(i + 1) / half_nodes;
        double d0 = warp(u0), d1 = warp(u1);
        double dm = warp(0.5 * (u0 + u1));
        double t = side == 0 ? s_lo + dm : s_hi - dm;
        cplx tau = par.direction(t);
        cplx x = par.position(t);
        x = detail::project_to_curve(a, k, x, tau,
                                     std::min(0.45 * family.grid_step, 0.3 * (d1 - d0) + 1e-3));
        try {
          DensitySample ds = detail::density_with_retry(a, k, x, tau);
          out.append(x, std::max(ds.real_density, 0.0) * (d1 - d0), d1 - d0, arc_id);
        } catch (const NearSingularity&) {
          // swallowed: stub nodes already account for this region
        }
      }
    }

    // analytic tails beyond the truncation circle: rho ~ C |lambda|^{-1-delta}
    // with the first correction O(|lambda|^{-delta}) removed by regression
    for (int side = 0; side < 2; ++side) {
      if (!plan[side].truncated || k == 0) continue;
      double delta = k < 0 ? 1.0 / a.q() : 1.0 / a.p();
      const ArcEndpoint& ep = side == 0 ? arc.begin : arc.end;
      cplx dir = unitize(ep.where);
      std::vector<double> xs, ys;
      for (int i = 0; i < 10; ++i) {
        double d = (0.015 + 0.05 * i) * S;
        double t = side == 0 ? d : S - d;
        cplx x = par.position(t);
        if (std::abs(x) < 0.25 * R) continue;
        cplx tau = par.direction(t);
        x = detail::project_to_curve(a, k, x, tau, 0.4 * family.grid_step);
        try {
          double rho = detail::density_with_retry(a, k, x, tau).real_density;
          xs.push_back(std::pow(std::abs(x), -delta));
          ys.push_back(rho * std::pow(std::abs(x), 1.0 + delta));
        } catch (const Error&) {
        }
      }
      if (xs.size() < 3) continue;
      double C = detail::line_fit(xs, ys).second;
      if (!(C > 0.0)) continue;
      double r = R;
      const double growth = 1.6;
      while (r < R * opts.tail_radius_factor) {
        double r2 = r * growth;
        double mass = C * (std::pow(r, -delta) - std::pow(r2, -delta)) / delta;
        out.append(dir * std::sqrt(r * r2), mass, r2 - r, arc_id);
        r = r2;
      }
    }
  }

  double target = k <= 0 ? double(a.q() + k) / a.q() : double(a.p() - k) / a.p();
  if (std::abs(out.total_mass() - target) > opts.mass_tol * std::max(1.0, target))
    throw MassMismatch("quadrature mass deviates from the admissible target");
  return out;
}

inline DiscreteMeasure discretize_measure(const LaurentSymbol& a, int k, const CurveFamily& family,
                                          int nodes_per_arc) {
  QuadratureOptions opts;
  opts.nodes_per_arc = nodes_per_arc;
  return discretize_measure(a, k, family, opts);
}

/// sum w_i log|lambda - x_i|.
inline double log_potential(const DiscreteMeasure& m, cplx lambda) {
  double s = 0.0;
  const double collide = 1e-12 * (1.0 + std::abs(lambda));
  for (std::size_t i = 0; i < m.size(); ++i) {
    double d = std::abs(lambda - m.points[i]);
    if (d < collide) throw SupportCollision("potential evaluated on a support point");
    s += m.weights[i] * std::log(d);
  }
  return s;
}

/// sum w_i / (x_i - lambda).
inline cplx cauchy_transform(const DiscreteMeasure& m, cplx lambda) {
  cplx s = 0.0;
  const double collide = 1e-12 * (1.0 + std::abs(lambda));
  for (std::size_t i = 0; i < m.size(); ++i) {
    cplx d = m.points[i] - lambda;
    if (std::abs(d) < collide) throw SupportCollision("transform evaluated on a support point");
    s += m.weights[i] / d;
  }
  return s;
}

/// The constant in int log|lambda - x| dmu_k = -log|w_k| + alpha_k:
/// (1 + k/q) log|a_{-q}| for k <= 0, log|a_{-q}| - (k/p) log|a_p| for k >= 0,
/// and 0 at k = -q, p by the zero-measure convention.
inline double alpha_k(const LaurentSymbol& a, int k) {
  if (k < -a.q() || k > a.p()) throw IndexOutOfRange("alpha index outside [-q, p]");
  if (k == -a.q() || k == a.p()) return 0.0;
  double la = std::log(std::abs(a.coeff(-a.q())));
  if (k <= 0) return la + (double(k) / a.q()) * la;
  return la - (double(k) / a.p()) * std::log(std::abs(a.coeff(a.p())));
}

}  // namespace btoep
