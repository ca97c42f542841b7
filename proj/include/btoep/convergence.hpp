#pragma once

#include <algorithm>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/curves.hpp"
#include "btoep/errors.hpp"
#include "btoep/measures.hpp"
#include "btoep/toeplitz.hpp"

namespace btoep {

/// Normalized zero counting measure of P_{k,n}: mass 1/n per zero with
/// multiplicity; total mass d_{k,n}/n.
inline DiscreteMeasure empirical_measure(const LaurentSymbol& a, int k, int n) {
  SpectralSet s = generalized_spectrum(a, k, n);
  DiscreteMeasure m;
  for (cplx z : s.flat()) m.append(z, 1.0 / n, 0.0);
  m.spacing.clear();
  return m;
}

inline DiscreteMeasure empirical_measure(const SpectralSet& s) {
  DiscreteMeasure m;
  for (cplx z : s.flat()) m.append(z, 1.0 / s.n, 0.0);
  m.spacing.clear();
  return m;
}

/// Mass-quantile positions of a discrete measure, used as initial guesses
/// for spectra at dimensions where coefficient root-finding alone loses
/// conditioning. The iteration still converges to (validated) zeros of
/// P_{k,n}; only the starting configuration comes from the measure.
inline std::vector<cplx> measure_quantiles(const DiscreteMeasure& m, int count) {
  std::vector<cplx> out;
  double total = m.total_mass();
  if (!(total > 0.0) || count < 1 || m.size() == 0) return out;
  double acc = 0.0;
  std::size_t i = 0;
  for (int j = 0; j < count; ++j) {
    double target = (j + 0.5) * total / count;
    while (i + 1 < m.size() && acc + m.weights[i] < target) acc += m.weights[i++];
    out.push_back(m.points[i]);
  }
  return out;
}

/// Probes for the Cauchy-transform comparison: points on a circle of twice
/// the largest branch-point magnitude, kept away from the curve.
inline std::vector<cplx> default_probes(const LaurentSymbol& a, const CurveFamily& family,
                                        double min_distance = 0.1) {
  double r = 0.0;
  for (cplx bp : branch_points(a)) r = std::max(r, std::abs(bp));
  r = 2.0 * std::max(r, 0.5);
  std::vector<cplx> out;
  for (int i = 0; i < 8; ++i) {
    cplx z = r * std::polar(1.0, 2.0 * pi * (i + 0.5) / 8.0);
    if (distance_to_family(family, z) > min_distance) out.push_back(z);
  }
  return out;
}

/// max over probes of |Cauchy(mu_{k,n}) - w_k'/w_k|; O(1/n) off the curve.
inline double cauchy_error(const LaurentSymbol& a, int k, int n, const std::vector<cplx>& probes,
                           const CurveFamily* family = nullptr) {
  if (probes.empty()) throw ProbeOnCurve("no probes available off the curve");
  if (family)
    for (cplx p : probes)
      if (distance_to_family(*family, p) < 0.1) throw ProbeOnCurve("probe too close to the curve");
  DiscreteMeasure m = empirical_measure(a, k, n);
  double worst = 0.0;
  for (cplx p : probes) {
    cplx lhs = cauchy_transform(m, p);
    cplx rhs = w_logderiv(a, k, p);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

struct CurveDistance {
  double max_distance = 0.0;  // over zeros inside the truncation radius
  int excluded = 0;           // zeros beyond the truncation radius
};

/// Distance from each zero of P_{k,n} to the traced polylines.
inline CurveDistance curve_distance(const LaurentSymbol& a, int k, int n,
                                    const CurveFamily& family) {
  SpectralSet s = generalized_spectrum(a, k, n);
  CurveDistance out;
  for (cplx z : s.flat()) {
    if (std::abs(z) > family.truncation_radius) {
      ++out.excluded;
      continue;
    }
    out.max_distance = std::max(out.max_distance, distance_to_family(family, z));
  }
  return out;
}

struct ConvergenceEntry {
  int n = 0;
  double mass = 0.0;
  double cauchy_error = 0.0;
  double curve_distance = 0.0;
  int excluded = 0;
};

struct ConvergenceReport {
  int k = 0;
  std::vector<ConvergenceEntry> entries;
};

/// Convergence diagnostics of the empirical measures against mu_k over a
/// schedule of matrix dimensions.
inline ConvergenceReport convergence_report(const LaurentSymbol& a, int k,
                                            const std::vector<int>& ns,
                                            const CurveFamily& family) {
  ConvergenceReport report;
  report.k = k;
  std::vector<cplx> probes = default_probes(a, family);
  QuadratureOptions qopts;
  qopts.nodes_per_arc = 192;
  qopts.mass_tol = 0.05;
  DiscreteMeasure mu = discretize_measure(a, k, family, qopts);
  for (int n : ns) {
    ConvergenceEntry e;
    e.n = n;
    std::vector<cplx> pool = measure_quantiles(mu, char_poly_degree_bound(a, k, n));
    SpectralSet s = generalized_spectrum(a, k, n, true, &pool);
    DiscreteMeasure m = empirical_measure(s);
    e.mass = m.total_mass();
    double worst = 0.0;
    for (cplx p : probes)
      worst = std::max(worst, std::abs(cauchy_transform(m, p) - w_logderiv(a, k, p)));
    e.cauchy_error = worst;
    for (cplx z : s.flat()) {
      if (std::abs(z) > family.truncation_radius) {
        ++e.excluded;
        continue;
      }
      e.curve_distance = std::max(e.curve_distance, distance_to_family(family, z));
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace btoep
