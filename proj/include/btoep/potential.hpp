#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"
#include "btoep/measures.hpp"
#include "btoep/symbol.hpp"

namespace btoep {

/// Admissible vector of measures nu_{-q+1} .. nu_{p-1}; the components at
/// k = -q and k = p are zero measures by convention.
struct MeasureVector {
  int p = 0, q = 0;
  std::vector<DiscreteMeasure> comps;  // index 0 holds k = -q+1

  static MeasureVector zeros(int p, int q) {
    MeasureVector v;
    v.p = p;
    v.q = q;
    v.comps.resize(static_cast<std::size_t>(p + q - 1));
    return v;
  }

  bool has(int k) const { return k >= -q + 1 && k <= p - 1; }
  const DiscreteMeasure& at(int k) const {
    if (!has(k)) throw IndexOutOfRange("measure-vector index out of range");
    return comps[static_cast<std::size_t>(k + q - 1)];
  }
  DiscreteMeasure& at(int k) {
    if (!has(k)) throw IndexOutOfRange("measure-vector index out of range");
    return comps[static_cast<std::size_t>(k + q - 1)];
  }

  double mass_target(int k) const {
    return k <= 0 ? double(q + k) / q : double(p - k) / p;
  }
};

/// The discretized minimizer: every component traced and quadratured.
inline MeasureVector discretize_vector(const LaurentSymbol& a, double r_max,
                                       const QuadratureOptions& opts = {}) {
  MeasureVector v = MeasureVector::zeros(a.p(), a.q());
  for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
    CurveFamily fam = trace_curve(a, k, r_max);
    v.at(k) = discretize_measure(a, k, fam, opts);
  }
  return v;
}

inline void check_admissible(const MeasureVector& v, double tol = 0.02) {
  if (static_cast<int>(v.comps.size()) != v.p + v.q - 1)
    throw AdmissibilityViolation("component count does not match p + q - 1");
  for (int k = -v.q + 1; k <= v.p - 1; ++k) {
    double target = v.mass_target(k);
    if (std::abs(v.at(k).total_mass() - target) > tol * std::max(1.0, target))
      throw AdmissibilityViolation("component mass violates the admissibility constraint");
  }
}

namespace detail {

/// -log kernel averaged over a segment of width h centered at distance d,
/// used for interactions below the mesh resolution where the raw kernel
/// would blow up on interleaved supports.
inline double neg_log_segment_avg(double d, double h) {
  double a = d - 0.5 * h, b = d + 0.5 * h;
  auto prim = [](double t) { return t == 0.0 ? 0.0 : t * std::log(std::abs(t)) - t; };
  return -(prim(b) - prim(a)) / h;
}

}  // namespace detail

/// Mutual logarithmic energy I(m1, m2) = sum -log|x - y| w_x w_y.
/// Node pairs closer than the local spacing use the segment-averaged kernel.
inline double energy_mutual(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  double s = 0.0;
  const bool h1 = m1.spacing.size() == m1.size();
  const bool h2 = m2.spacing.size() == m2.size();
  for (std::size_t i = 0; i < m1.size(); ++i) {
    for (std::size_t j = 0; j < m2.size(); ++j) {
      double d = std::abs(m1.points[i] - m2.points[j]);
      double h = std::max(h1 ? m1.spacing[i] : 0.0, h2 ? m2.spacing[j] : 0.0);
      double kern;
      if (h == 0.0) {
        if (d < 1e-14) throw SupportCollision("coincident support points in mutual energy");
        kern = -std::log(d);
      } else if (d < 1e-9 * h) {
        // coincident nodes take the self-cell convention so signed
        // differences see one consistent quadratic form
        kern = 1.0 - std::log(h);
      } else if (d < 0.75 * h) {
        kern = detail::neg_log_segment_avg(d, h);
      } else {
        kern = -std::log(d);
      }
      s += m1.weights[i] * m2.weights[j] * kern;
    }
  }
  return s;
}

/// Self energy: off-diagonal double sum plus the per-node correction
/// w_i^2 (1 - log h_i) for the cell's own logarithmic mass.
inline double energy_self(const DiscreteMeasure& m) {
  double s = 0.0;
  const bool hs = m.spacing.size() == m.size();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      double d = std::abs(m.points[i] - m.points[j]);
      double h = hs ? std::max(m.spacing[i], m.spacing[j]) : 0.0;
      double kern;
      if (d < 1e-14 && h == 0.0)
        throw SupportCollision("coincident support points in self energy");
      if (d < 0.75 * h)
        kern = detail::neg_log_segment_avg(d, h);
      else
        kern = -std::log(d);
      s += 2.0 * m.weights[i] * m.weights[j] * kern;
    }
    double hi = hs ? m.spacing[i] : 0.0;
    if (hi > 0.0) s += m.weights[i] * m.weights[i] * (1.0 - std::log(hi));
  }
  return s;
}

inline double energy_I(const DiscreteMeasure& m) { return energy_self(m); }
inline double energy_I(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  return energy_mutual(m1, m2);
}

/// Nikishin interaction matrix: 1 on the diagonal, -1/2 between adjacent
/// components, 0 otherwise.
inline std::vector<std::vector<double>> interaction_matrix(int p, int q) {
  int n = p + q - 1;
  std::vector<std::vector<double>> A(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    if (i + 1 < n) {
      A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + 1)] = -0.5;
      A[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(i)] = -0.5;
    }
  }
  return A;
}

struct EnergyValues {
  double direct = 0.0;
  double alt = 0.0;
  double matrix = 0.0;
};

/// The energy functional evaluated three equivalent ways: the direct sum
/// sum_k I(nu_k) - sum_k I(nu_k, nu_{k+1}), the telescoped form built on
/// (1/q + 1/p) I(nu_0), and the quadratic form with the interaction matrix.
/// The telescoped combination equals twice the direct functional, so it is
/// halved here to make the three values agree.
inline EnergyValues energy_J(const MeasureVector& v, double admissibility_tol = 0.02) {
  check_admissible(v, admissibility_tol);
  const int lo = -v.q + 1, hi = v.p - 1;

  std::vector<double> self(static_cast<std::size_t>(hi - lo + 1));
  std::vector<double> cross(static_cast<std::size_t>(std::max(0, hi - lo)));
  for (int k = lo; k <= hi; ++k) self[static_cast<std::size_t>(k - lo)] = energy_self(v.at(k));
  for (int k = lo; k < hi; ++k)
    cross[static_cast<std::size_t>(k - lo)] = energy_mutual(v.at(k), v.at(k + 1));

  EnergyValues out;
  for (double s : self) out.direct += s;
  for (double c : cross) out.direct -= c;

  // telescoped representation, halved (the printed form double-counts)
  double alt2 = (1.0 / v.q + 1.0 / v.p) * self[static_cast<std::size_t>(-lo)];
  for (int k = 1; k <= v.q - 1; ++k) {
    // I(nu_{-q+k}/k - nu_{-q+k+1}/(k+1)) expanded over the discrete terms
    double Ia = self[static_cast<std::size_t>(k - 1)];
    double Ib = self[static_cast<std::size_t>(k)];
    double Iab = cross[static_cast<std::size_t>(k - 1)];
    alt2 += double(k) * (k + 1) *
            (Ia / double(k * k) + Ib / double((k + 1) * (k + 1)) - 2.0 * Iab / double(k * (k + 1)));
  }
  for (int k = 1; k <= v.p - 1; ++k) {
    int ia = v.p - k - lo, ib = v.p - k - 1 - lo;
    double Ia = self[static_cast<std::size_t>(ia)];
    double Ib = self[static_cast<std::size_t>(ib)];
    double Iab = cross[static_cast<std::size_t>(std::min(ia, ib))];
    alt2 += double(k) * (k + 1) *
            (Ia / double(k * k) + Ib / double((k + 1) * (k + 1)) - 2.0 * Iab / double(k * (k + 1)));
  }
  out.alt = 0.5 * alt2;

  auto A = interaction_matrix(v.p, v.q);
  for (int i = lo; i <= hi; ++i)
    for (int j = lo; j <= hi; ++j) {
      double aij = A[static_cast<std::size_t>(i - lo)][static_cast<std::size_t>(j - lo)];
      if (aij == 0.0) continue;
      double e = i == j ? self[static_cast<std::size_t>(i - lo)]
                        : cross[static_cast<std::size_t>(std::min(i, j) - lo)];
      out.matrix += aij * e;
    }
  return out;
}

namespace detail {

/// Boundary alpha values consistent with the Euler-Lagrange identities:
/// the zero measures mu_{-q}, mu_p have identically zero potential, so the
/// identity -log|w_k| + alpha_k forces alpha_p = log|a_{-q}/a_p| and
/// alpha_{-q} = 0. (alpha_k itself keeps the plain 0 convention at both
/// boundary indices; the two agree whenever |a_{-q}| = |a_p|.)
inline double alpha_el(const LaurentSymbol& a, int k) {
  if (k == a.p()) return std::log(std::abs(a.coeff(-a.q()))) - std::log(std::abs(a.coeff(a.p())));
  return alpha_k(a, k);
}

}  // namespace detail

/// Euler-Lagrange constant l_k = 2 alpha_k - alpha_{k+1} - alpha_{k-1}.
inline double el_constant(const LaurentSymbol& a, int k) {
  return 2.0 * detail::alpha_el(a, k) - detail::alpha_el(a, k + 1) - detail::alpha_el(a, k - 1);
}

/// Residual of the Euler-Lagrange condition at lambda on Gamma_k:
/// 2 U_k - U_{k+1} - U_{k-1} - l_k with U_j the log-potential of component
/// j (zero measure outside the range).
inline double el_residual(const LaurentSymbol& a, const MeasureVector& v, int k, cplx lambda) {
  if (!v.has(k)) throw IndexOutOfRange("Euler-Lagrange index out of range");
  auto U = [&](int j) -> double {
    if (!v.has(j)) return 0.0;
    return log_potential(v.at(j), lambda);
  };
  return 2.0 * U(k) - U(k + 1) - U(k - 1) - el_constant(a, k);
}

/// Transfers fraction delta of component k's mass from the first half of
/// its nodes (by index) onto the second half, preserving the total.
inline MeasureVector transfer_mass(const MeasureVector& v, int k, double delta) {
  MeasureVector out = v;
  DiscreteMeasure& m = out.at(k);
  if (m.size() < 2) throw AdmissibilityViolation("component too small to perturb");
  std::size_t half = m.size() / 2;
  double donor = 0.0, receiver = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    (i < half ? donor : receiver) += m.weights[i];
  if (!(donor > 0.0) || !(receiver > 0.0))
    throw AdmissibilityViolation("degenerate donor or receiver mass");
  double moved = delta * donor;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i < half)
      m.weights[i] *= 1.0 - delta;
    else
      m.weights[i] *= 1.0 + moved / receiver;
  }
  return out;
}

/// J(perturbed) - J(reference) for a mass-preserving transfer within one
/// component; positive for any perturbation away from the minimizer.
inline double minimality_delta(const MeasureVector& v_ref, int k, double delta,
                               double admissibility_tol = 0.02) {
  MeasureVector pert = transfer_mass(v_ref, k, delta);
  return energy_J(pert, admissibility_tol).direct - energy_J(v_ref, admissibility_tol).direct;
}

}  // namespace btoep
