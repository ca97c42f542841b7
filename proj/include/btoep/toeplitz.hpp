#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"
#include "btoep/parallel.hpp"
#include "btoep/polyroots.hpp"
#include "btoep/roots.hpp"
#include "btoep/symbol.hpp"

namespace btoep {

/// Overflow-safe determinant value: det = unit * exp(log_abs), |unit| = 1.
struct LogComplex {
  double log_abs = 0.0;
  cplx unit = 1.0;
  bool zero = false;

  cplx value() const {
    if (zero) return 0.0;
    return unit * std::exp(log_abs);
  }
  bool representable() const { return zero || std::abs(log_abs) < 700.0; }
};

/// n x n Toeplitz matrix of the symbol z^{-k}(a(z) - lambda): entry (i, j)
/// is a_{i-j+k} - lambda [i-j+k = 0], giving p-k sub- and q+k superdiagonals.
struct BandedToeplitz {
  int n = 0;
  int lower = 0;  // p - k
  int upper = 0;  // q + k
  std::vector<cplx> diag;  // diag[d + upper] = value on diagonal i - j = d

  cplx entry(int i, int j) const {
    int d = i - j;
    if (d < -upper || d > lower) return 0.0;
    return diag[static_cast<std::size_t>(d + upper)];
  }
};

inline BandedToeplitz shifted_toeplitz(const LaurentSymbol& a, int k, cplx lambda, int n) {
  if (k < -a.q() + 1 || k > a.p() - 1) throw IndexOutOfRange("shift index k out of range");
  if (n < 1) throw IndexOutOfRange("matrix dimension must be positive");
  BandedToeplitz t;
  t.n = n;
  t.lower = a.p() - k;
  t.upper = a.q() + k;
  t.diag.resize(static_cast<std::size_t>(t.lower + t.upper + 1));
  for (int d = -t.upper; d <= t.lower; ++d) {
    cplx v = a.coeff(d + k);
    if (d + k == 0) v -= lambda;
    t.diag[static_cast<std::size_t>(d + t.upper)] = v;
  }
  return t;
}

namespace detail {

/// Banded determinant through a Givens QR sweep. Orthogonal eliminations
/// cannot amplify entries (banded elimination with partial pivoting shows
/// exponential element growth on some shifted-Toeplitz bands, which wrecks
/// the determinant long before n = 256), and each rotation has unit
/// determinant so det A = prod R_jj exactly. Returned in log form.
inline LogComplex banded_logdet(const BandedToeplitz& t) {
  const int n = t.n, kl = t.lower, ku = t.upper;
  const int width = 2 * kl + ku + 1;  // row i holds columns [i-kl, i+kl+ku]
  std::vector<cplx> ab(static_cast<std::size_t>(width) * static_cast<std::size_t>(n), cplx(0.0));
  auto at = [&](int i, int j) -> cplx& {
    return ab[static_cast<std::size_t>(i) * width + (j - i + kl)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) at(i, j) = t.entry(i, j);

  LogComplex det;
  double scale = 0.0;
  for (cplx v : t.diag) scale = std::max(scale, std::abs(v));
  const double zero_tol = scale * 1e-305;

  for (int j = 0; j < n; ++j) {
    int last_row = std::min(n - 1, j + kl);
    int last_col = std::min(n - 1, j + kl + ku);
    for (int i = j + 1; i <= last_row; ++i) {
      cplx b = at(i, j);
      if (std::abs(b) == 0.0) continue;
      cplx a = at(j, j);
      double r = std::hypot(std::abs(a), std::abs(b));
      double c;
      cplx s;
      if (std::abs(a) == 0.0) {
        c = 0.0;
        s = unitize(std::conj(b));
      } else {
        c = std::abs(a) / r;
        s = a * std::conj(b) / (r * std::abs(a));
      }
      for (int jj = j; jj <= last_col; ++jj) {
        cplx top = at(j, jj), bot = at(i, jj);
        at(j, jj) = c * top + s * bot;
        at(i, jj) = -std::conj(s) * top + c * bot;
      }
    }
    cplx pivot = at(j, j);
    if (!(std::abs(pivot) > zero_tol)) {
      det.zero = true;
      return det;
    }
    det.log_abs += std::log(std::abs(pivot));
    det.unit *= pivot / std::abs(pivot);
  }
  return det;
}

}  // namespace detail

/// det T_n(z^{-k}(a - lambda)) by banded elimination with partial pivoting.
inline LogComplex det_eval(const LaurentSymbol& a, int k, cplx lambda, int n) {
  return detail::banded_logdet(shifted_toeplitz(a, k, lambda, n));
}

/// Degree bound for P_{k,n}: n for k = 0, floor(n(p-k)/p) for k > 0,
/// floor(n(q+k)/q) for k < 0.
inline int char_poly_degree_bound(const LaurentSymbol& a, int k, int n) {
  if (k == 0) return n;
  if (k > 0) return (n * (a.p() - k)) / a.p();
  return (n * (a.q() + k)) / a.q();
}

/// P_{k,n} in ascending powers of lambda, recovered from determinant values
/// at D+1 nodes on a circle by an inverse discrete Fourier transform.
struct CharPolynomial {
  int k = 0;
  int n = 0;
  std::vector<cplx> coeffs;      // ascending; may carry a common log scale
  double log_scale = 0.0;        // true coefficient = coeffs[m] * exp(log_scale)
  double node_radius = 1.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx leading() const { return coeffs.back() * std::exp(log_scale); }
};

namespace detail {

/// Interpolation circle radius: the centroid magnitude of the branch
/// points, widened to enclose the branch-point hull (a circle inside the
/// zero set would push the true leading coefficient below the recoverable
/// range) and floored away from zero by the symbol scale.
inline double node_circle_radius(const LaurentSymbol& a) {
  std::vector<cplx> bp = branch_points(a);
  double mean = 0.0, top = 0.0;
  for (cplx b : bp) {
    mean += std::abs(b);
    top = std::max(top, std::abs(b));
  }
  mean /= static_cast<double>(bp.size());
  double floor_r = 0.1 * (a.scale() + 1.0);
  return std::max({mean, 1.5 * top, floor_r});
}

}  // namespace detail

inline CharPolynomial char_poly(const LaurentSymbol& a, int k, int n) {
  const int D = char_poly_degree_bound(a, k, n);
  CharPolynomial cp;
  cp.k = k;
  cp.n = n;
  cp.node_radius = detail::node_circle_radius(a);
  if (k != 0 && D >= 1) {
    // widen toward the geometric mean of the zero magnitudes, which for the
    // unbounded curves grows with n: |P(0)/gamma|^(1/D) with gamma bounded
    // by the extreme coefficient powers
    LogComplex p0 = det_eval(a, k, 0.0, n);
    if (!p0.zero) {
      double log_gamma = k > 0 ? (double(k) * n / a.p()) * std::log(std::abs(a.coeff(a.p())))
                               : (double(-k) * n / a.q()) * std::log(std::abs(a.coeff(-a.q())));
      double gm = std::exp((p0.log_abs - log_gamma) / D);
      if (std::isfinite(gm)) cp.node_radius = std::clamp(gm, cp.node_radius, 1e6 * cp.node_radius);
    }
  }
  const int m = D + 1;

  std::vector<LogComplex> dets(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
    double th = 2.0 * pi * static_cast<double>(j) / m;
    cplx node = cp.node_radius * cplx(std::cos(th), std::sin(th));
    dets[j] = det_eval(a, k, node, n);
  });

  double top = -std::numeric_limits<double>::infinity();
  for (const LogComplex& d : dets)
    if (!d.zero) top = std::max(top, d.log_abs);
  if (!std::isfinite(top)) {
    // identically zero on the node circle: P is the zero polynomial section
    cp.coeffs = {cplx(0.0)};
    return cp;
  }
  double bottom = top;
  for (const LogComplex& d : dets)
    if (!d.zero) bottom = std::min(bottom, d.log_abs);
  if (top - bottom > 650.0)
    throw InterpolationConditioning("determinant magnitudes span too many decades on the node circle");

  std::vector<cplx> values(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    values[static_cast<std::size_t>(j)] =
        dets[static_cast<std::size_t>(j)].zero
            ? cplx(0.0)
            : dets[static_cast<std::size_t>(j)].unit *
                  std::exp(dets[static_cast<std::size_t>(j)].log_abs - top);

  cp.coeffs.assign(static_cast<std::size_t>(m), cplx(0.0));
  double circle_norm = 0.0;  // max_m |c_m| r^m, the coefficient scale on the circle
  for (int mm = 0; mm < m; ++mm) {
    cplx sum = 0.0;
    for (int j = 0; j < m; ++j) {
      double th = -2.0 * pi * static_cast<double>(mm) * static_cast<double>(j) / m;
      sum += values[static_cast<std::size_t>(j)] * cplx(std::cos(th), std::sin(th));
    }
    sum /= static_cast<double>(m);
    circle_norm = std::max(circle_norm, std::abs(sum));
    cp.coeffs[static_cast<std::size_t>(mm)] = sum / std::pow(cp.node_radius, mm);
  }

  // trim trailing numerically-zero coefficients (circle metric) only where
  // the degree is not pinned by the theory: k = 0 has degree n exactly and
  // the k != 0 cases at multiples of p (resp. q) attain the bound
  bool degree_known = k == 0 || (k > 0 && n % a.p() == 0) || (k < 0 && n % a.q() == 0);
  if (!degree_known) {
    const double trim_tol = 1e-7 * circle_norm;
    while (cp.coeffs.size() > 1 &&
           std::abs(cp.coeffs.back()) * std::pow(cp.node_radius, cp.coeffs.size() - 1.0) < trim_tol)
      cp.coeffs.pop_back();
  }

  // fold the scale back in when safely representable
  if (std::abs(top) < 300.0) {
    for (cplx& c : cp.coeffs) c *= std::exp(top);
    cp.log_scale = 0.0;
  } else {
    cp.log_scale = top;
  }
  return cp;
}

/// Zeros of P_{k,n} with multiplicities.
struct SpectralSet {
  int k = 0;
  int n = 0;
  std::vector<cplx> zeros;
  std::vector<int> mult;

  int total() const {
    int t = 0;
    for (int m : mult) t += m;
    return t;
  }
  /// All zeros repeated by multiplicity.
  std::vector<cplx> flat() const {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < zeros.size(); ++i)
      out.insert(out.end(), static_cast<std::size_t>(mult[i]), zeros[i]);
    return out;
  }
};

namespace detail {

/// Simultaneous Aberth sweep where P and P'/P are evaluated through the
/// banded determinant itself (central differences of the complex log).
/// This polishes interpolation roots past the conditioning limit of the
/// monomial basis.
inline void det_polish(const LaurentSymbol& a, int k, int n, std::vector<cplx>& z,
                       double radius, int sweeps = 60) {
  const int d = static_cast<int>(z.size());
  if (d == 0) return;
  const double stop = 1e-12 * (radius + 1.0);
  // the difference step must shrink with the remaining correction, otherwise
  // the phase of P aliases once an iterate sits within h of a zero
  std::vector<double> last_step(static_cast<std::size_t>(d), 1e-2 * radius);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double max_step = 0.0;
    for (int i = 0; i < d; ++i) {
      cplx zi = z[static_cast<std::size_t>(i)];
      double dnear = radius;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        dnear = std::min(dnear, std::abs(zi - z[static_cast<std::size_t>(j)]));
      }
      double h = std::min(1e-4 * dnear, 0.3 * last_step[static_cast<std::size_t>(i)]);
      h = std::clamp(h, 1e-10 * (radius + std::abs(zi)), 1e-3 * radius);
      if (!(h > 0.0)) h = 1e-10 * radius;
      LogComplex lp = det_eval(a, k, zi + h, n);
      LogComplex lm = det_eval(a, k, zi - h, n);
      if (lp.zero || lm.zero) {
        z[static_cast<std::size_t>(i)] = zi + cplx(0.3 * h, 0.4 * h);
        max_step = std::max(max_step, h);
        continue;
      }
      double dlog = lp.log_abs - lm.log_abs;
      double darg = std::arg(lp.unit * std::conj(lm.unit));
      cplx g = cplx(dlog, darg) / (2.0 * h);  // P'/P
      if (std::abs(g) == 0.0) continue;
      cplx newton = 1.0 / g;
      cplx repel = 0.0;
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        cplx diff = zi - z[static_cast<std::size_t>(j)];
        if (std::abs(diff) == 0.0) diff = cplx(h, h);
        repel += 1.0 / diff;
      }
      cplx denom = 1.0 - newton * repel;
      cplx step = std::abs(denom) > 1e-14 ? newton / denom : newton;
      double cap = 0.5 * dnear + 0.25 * (radius + std::abs(zi));
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      if (!finite(step)) continue;
      z[static_cast<std::size_t>(i)] = zi - step;
      last_step[static_cast<std::size_t>(i)] =
          std::max(std::abs(step), 3.0 * h * 1e-3);
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step < stop) break;
  }
}

}  // namespace detail

namespace detail {

/// True when z sits within ~eps of a zero of P of any multiplicity:
/// log|P(z)| must dip at least m log(h/eps) >= log(h/eps) below the level
/// of the four neighbors at distance h. Works for clusters and multiple
/// zeros where phase-based Newton residuals alias.
inline bool near_determinant_zero(const LaurentSymbol& a, int k, int n, cplx z, double scale) {
  const double h = 1e-5 * scale;
  const double eps = 1e-6 * scale;
  LogComplex center = det_eval(a, k, z, n);
  if (center.zero) return true;
  double level = -std::numeric_limits<double>::infinity();
  for (cplx d : {cplx(h, 0.0), cplx(-h, 0.0), cplx(0.0, h), cplx(0.0, -h)}) {
    LogComplex s = det_eval(a, k, z + d, n);
    if (!s.zero) level = std::max(level, s.log_abs);
  }
  if (!std::isfinite(level)) return true;  // the section vanishes around z
  return center.log_abs <= level - std::log(h / eps);
}

}  // namespace detail

/// Coefficient interpolation degrades beyond this dimension; callers must
/// raise the cap explicitly to go further.
inline constexpr int spectrum_dimension_cap = 256;

/// All zeros of P_{k,n}, with multiplicity, via simultaneous root iteration
/// on the interpolated polynomial followed by determinant-based polishing.
/// Optional initial guesses (for example quantiles of the limiting measure)
/// replace the interpolation roots when their count matches the degree.
/// Every reported zero is validated against the determinant; unresolved
/// iterates raise RootSolverFailure rather than polluting the spectrum.
inline SpectralSet generalized_spectrum(const LaurentSymbol& a, int k, int n, bool polish = true,
                                        const std::vector<cplx>* init = nullptr,
                                        int n_cap = spectrum_dimension_cap) {
  if (n > n_cap) throw IndexOutOfRange("matrix dimension exceeds the interpolation cap");
  CharPolynomial cp = char_poly(a, k, n);
  SpectralSet out;
  out.k = k;
  out.n = n;
  if (cp.degree() < 1) return out;

  std::vector<cplx> z;
  if (init && !init->empty()) {
    const int d = cp.degree();
    z.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      z[static_cast<std::size_t>(i)] =
          (*init)[static_cast<std::size_t>((static_cast<long long>(i) * init->size()) / d)];
    // split any coincident picks so the simultaneous iteration can separate
    for (int i = 1; i < d; ++i)
      if (std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i - 1)]) <
          1e-12 * cp.node_radius)
        z[static_cast<std::size_t>(i)] +=
            1e-4 * (1.0 + std::abs(z[static_cast<std::size_t>(i)])) *
            std::polar(1.0, 0.7 + 1.9 * i);
  } else {
    z = poly_roots(cp.coeffs);
  }
  if (polish) {
    detail::det_polish(a, k, n, z, cp.node_radius);
    bool all_converged = false;
    for (int attempt = 0; attempt < 3 && !all_converged; ++attempt) {
      all_converged = true;
      for (cplx zi : z)
        if (!detail::near_determinant_zero(a, k, n, zi, cp.node_radius + std::abs(zi))) {
          all_converged = false;
          break;
        }
      if (!all_converged) detail::det_polish(a, k, n, z, cp.node_radius, 80);
    }
    if (!all_converged)
      throw RootSolverFailure("spectrum iterates did not converge to determinant zeros");
  }

  // cluster into multiple zeros
  const double ctol = 1e-6 * cp.node_radius;
  std::sort(z.begin(), z.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  std::vector<bool> used(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (used[i]) continue;
    cplx center = z[i];
    int count = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(z[j] - center) <= ctol) {
        center = (center * double(count) + z[j]) / double(count + 1);
        ++count;
        used[j] = true;
      }
    }
    out.zeros.push_back(center);
    out.mult.push_back(count);
  }
  return out;
}

/// Widom's formula sum_M C_M w_M^n plus the dominant-term ratio
/// P_{k,n} / (C_{M_k} w_{M_k}^n).
struct WidomDet {
  LogComplex det;
  cplx dominant_ratio = 0.0;
};

inline WidomDet widom_det(const LaurentSymbol& a, int k, cplx lambda, int n) {
  RootSystem rs = roots_at(a, lambda);
  WidomExpansion ex = widom_terms(a, rs, k);
  // log of each term; accumulate relative to the dominant-w term
  const WidomTerm& dom = ex.terms[static_cast<std::size_t>(ex.dominant)];
  double dom_log = n * dom.log_w_abs + std::log(std::abs(dom.c));
  cplx dom_unit = unitize(dom.c) * std::pow(unitize(dom.w), n);

  cplx ratio = 0.0;
  for (const WidomTerm& t : ex.terms) {
    double rel_log = n * t.log_w_abs + std::log(std::abs(t.c)) - dom_log;
    cplx rel_unit = unitize(t.c) * std::pow(unitize(t.w), n) * std::conj(dom_unit);
    ratio += std::exp(rel_log) * rel_unit;
  }
  WidomDet out;
  out.dominant_ratio = ratio;
  out.det.zero = std::abs(ratio) == 0.0;
  if (!out.det.zero) {
    out.det.log_abs = dom_log + std::log(std::abs(ratio));
    out.det.unit = dom_unit * unitize(ratio);
  }
  return out;
}

}  // namespace btoep
