#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"
#include "btoep/polyroots.hpp"
#include "btoep/symbol.hpp"

namespace btoep {

/// The p+q solutions of a(z) = lambda ordered by nondecreasing modulus.
/// Ties in modulus (relative 1e-9 in log scale) are grouped and broken by
/// principal argument so the numbering is deterministic.
struct RootSystem {
  cplx lambda;
  int p = 0, q = 0;
  std::vector<cplx> roots;
  std::vector<cplx> derivs;      // z_j'(lambda) = 1/a'(z_j); NaN when invalid
  std::vector<bool> deriv_ok;    // false where a'(z_j) ~ 0
  std::vector<double> uncert;    // Newton-correction estimate of root error
  std::vector<std::pair<int, int>> tie_groups;  // inclusive 0-based ranges

  int count() const { return static_cast<int>(roots.size()); }

  bool tied(int i, int j) const {
    for (auto [lo, hi] : tie_groups)
      if (i >= lo && i <= hi && j >= lo && j <= hi) return true;
    return false;
  }
};

namespace detail {

inline constexpr double tie_log_tol = 1e-9;

inline bool log_tied(double la, double lb) {
  return std::abs(la - lb) <= tie_log_tol * (1.0 + std::max(std::abs(la), std::abs(lb)));
}

}  // namespace detail

/// Solves z^q (a(z) - lambda) = 0, polishes to the residual tolerance and
/// attaches implicit-function derivatives. A previous RootSystem at a nearby
/// lambda may be passed as a warm start.
inline RootSystem roots_at(const LaurentSymbol& a, cplx lambda, double tol = 1e-13,
                           const RootSystem* hint = nullptr) {
  const int n = a.span();
  std::vector<cplx> poly = a.shifted_poly(lambda);

  std::vector<cplx> init;
  const std::vector<cplx>* init_ptr = nullptr;
  if (hint && hint->count() == n) {
    init = hint->roots;
    init_ptr = &init;
  } else if (std::abs(lambda) > 10.0 * (a.scale() + 1.0)) {
    // split initialization on the two asymptotic rings: q roots collapsing
    // to 0 like (a_{-q}/lambda)^{1/q} and p roots growing like (lambda/a_p)^{1/p}
    init.resize(static_cast<std::size_t>(n));
    double rs = std::pow(std::abs(a.coeff(-a.q()) / lambda), 1.0 / a.q());
    double rl = std::pow(std::abs(lambda / a.coeff(a.p())), 1.0 / a.p());
    for (int j = 0; j < a.q(); ++j) {
      double th = 2.0 * pi * j / a.q() + 0.37;
      init[static_cast<std::size_t>(j)] = rs * cplx(std::cos(th), std::sin(th));
    }
    for (int j = 0; j < a.p(); ++j) {
      double th = 2.0 * pi * j / a.p() + 0.91;
      init[static_cast<std::size_t>(a.q() + j)] = rl * cplx(std::cos(th), std::sin(th));
    }
    init_ptr = &init;
  }

  PolyRootOptions opts;
  opts.tol = tol;
  std::vector<cplx> z = poly_roots(poly, opts, init_ptr);

  RootSystem rs;
  rs.lambda = lambda;
  rs.p = a.p();
  rs.q = a.q();
  rs.roots = std::move(z);

  std::sort(rs.roots.begin(), rs.roots.end(), [](cplx x, cplx y) {
    double lx = std::log(std::abs(x)), ly = std::log(std::abs(y));
    if (detail::log_tied(lx, ly)) return std::arg(x) < std::arg(y);
    return lx < ly;
  });

  // Newton-correction error estimate per root; near an m-fold root the
  // achievable accuracy is residual-limited and this picks that up.
  rs.uncert.resize(rs.roots.size());
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    cplx v, dv;
    detail::horner2(poly, rs.roots[j], v, dv);
    double u = std::abs(dv) > 0.0 ? std::abs(v / dv) : 0.1 * (1.0 + std::abs(rs.roots[j]));
    rs.uncert[j] = std::min(u, 0.1 * (1.0 + std::abs(rs.roots[j])));
  }

  // tie groups over consecutive moduli; the tolerance widens with the
  // relative root uncertainty so smeared multiple roots still group
  auto tied_pair = [&](std::size_t i) {
    double la = std::log(std::abs(rs.roots[i - 1]));
    double lb = std::log(std::abs(rs.roots[i]));
    double widen = 5.0 * (rs.uncert[i - 1] / std::abs(rs.roots[i - 1]) +
                          rs.uncert[i] / std::abs(rs.roots[i]));
    return std::abs(la - lb) <=
           detail::tie_log_tol * (1.0 + std::max(std::abs(la), std::abs(lb))) + widen;
  };
  int start = 0;
  for (int i = 1; i <= rs.count(); ++i) {
    bool chain = i < rs.count() && tied_pair(static_cast<std::size_t>(i));
    if (!chain) {
      if (i - 1 > start) rs.tie_groups.emplace_back(start, i - 1);
      start = i;
    }
  }
  // re-sort each tie group by argument (the chain tolerance is not transitive)
  for (auto [lo, hi] : rs.tie_groups)
    std::sort(rs.roots.begin() + lo, rs.roots.begin() + hi + 1,
              [](cplx x, cplx y) { return std::arg(x) < std::arg(y); });

  rs.derivs.resize(rs.roots.size());
  rs.deriv_ok.resize(rs.roots.size());
  for (std::size_t j = 0; j < rs.roots.size(); ++j) {
    cplx zj = rs.roots[j];
    cplx da = a.derivative(zj);
    // derivative magnitude scale at |z_j|
    double az = std::abs(zj);
    double ds = 0.0;
    for (int k = -a.q(); k <= a.p(); ++k)
      if (k != 0) ds += std::abs(double(k) * a.coeff(k)) * std::pow(az, k - 1);
    double prox = 1e300;
    for (std::size_t l = 0; l < rs.roots.size(); ++l)
      if (l != j) prox = std::min(prox, std::abs(zj - rs.roots[l]));
    bool ok = std::abs(da) > 1e-7 * ds && prox > 1e-5 * (1.0 + az);
    if (ok) {
      rs.derivs[j] = 1.0 / da;
      rs.deriv_ok[j] = true;
    } else {
      rs.derivs[j] = cplx(std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN());
      rs.deriv_ok[j] = false;
    }
  }
  return rs;
}

/// log|z_{q+k+1}| - log|z_{q+k}| >= 0; vanishes exactly on Gamma_k.
/// Computed from the moduli in ascending order, so the tie-group numbering
/// convention cannot perturb the value inside the tie tolerance band.
inline double modulus_gap(const RootSystem& rs, int k) {
  if (k < -rs.q + 1 || k > rs.p - 1) throw IndexOutOfRange("curve index k out of range");
  std::vector<double> logmod(rs.roots.size());
  for (std::size_t j = 0; j < rs.roots.size(); ++j) logmod[j] = std::log(std::abs(rs.roots[j]));
  std::sort(logmod.begin(), logmod.end());
  int i = rs.q + k - 1;  // 0-based index of z_{q+k}
  double g = logmod[static_cast<std::size_t>(i + 1)] - logmod[static_cast<std::size_t>(i)];
  return g > 0.0 ? g : 0.0;
}

inline double modulus_gap(const LaurentSymbol& a, int k, cplx lambda,
                          const RootSystem* hint = nullptr) {
  return modulus_gap(roots_at(a, lambda, 1e-13, hint), k);
}

namespace detail {

inline void require_off_curve(const RootSystem& rs, int k) {
  int i = rs.q + k - 1;
  if (rs.tied(i, i + 1)) throw OnCurve("lambda lies on Gamma_k within tolerance");
}

}  // namespace detail

/// w_k(lambda) = prod of the q+k smallest-modulus roots.
inline cplx w_value(const RootSystem& rs, int k) {
  if (k < -rs.q + 1 || k > rs.p - 1) throw IndexOutOfRange("curve index k out of range");
  detail::require_off_curve(rs, k);
  cplx w = 1.0;
  for (int j = 0; j < rs.q + k; ++j) w *= rs.roots[static_cast<std::size_t>(j)];
  return w;
}

/// w_k'/w_k = sum_{j<=q+k} z_j'/z_j. Requires a'(z_j) != 0 on the factors.
inline cplx w_logderiv(const RootSystem& rs, int k) {
  if (k < -rs.q + 1 || k > rs.p - 1) throw IndexOutOfRange("curve index k out of range");
  detail::require_off_curve(rs, k);
  cplx s = 0.0;
  for (int j = 0; j < rs.q + k; ++j) {
    if (!rs.deriv_ok[static_cast<std::size_t>(j)])
      throw DegenerateRoot("a'(z_j) vanishes; lambda is at or near a branch point");
    s += rs.derivs[static_cast<std::size_t>(j)] / rs.roots[static_cast<std::size_t>(j)];
  }
  return s;
}

inline cplx w_value(const LaurentSymbol& a, int k, cplx lambda) {
  return w_value(roots_at(a, lambda), k);
}

inline cplx w_logderiv(const LaurentSymbol& a, int k, cplx lambda) {
  return w_logderiv(roots_at(a, lambda), k);
}

/// One term of Widom's determinant expansion: subset M (0-based root
/// indices), w_M = (-1)^{p-k} a_p prod_{j in M} z_j and the coefficient
/// C_M = prod_{j in M} z_j^{q+k} prod_{j in M, l not in M} (z_j - z_l)^{-1}.
struct WidomTerm {
  std::vector<int> subset;
  cplx w;
  cplx c;
  double log_w_abs;
};

struct WidomExpansion {
  std::vector<WidomTerm> terms;
  int dominant = -1;  // index of the term with the largest |w_M|
};

/// All subsets with |M| = p-k. Throws DegenerateRoots when two roots are
/// closer than sep_tol relative to the root scale (C_M ill-conditioned).
inline WidomExpansion widom_terms(const LaurentSymbol& a, const RootSystem& rs, int k,
                                  double sep_tol = 1e-8) {
  if (k < -rs.q + 1 || k > rs.p - 1) throw IndexOutOfRange("curve index k out of range");
  const int n = rs.count();
  const int size = rs.p - k;

  double rscale = 0.0;
  for (cplx z : rs.roots) rscale = std::max(rscale, std::abs(z));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double sep = std::abs(rs.roots[static_cast<std::size_t>(i)] -
                            rs.roots[static_cast<std::size_t>(j)]);
      double floor = sep_tol * rscale;
      if (!rs.uncert.empty())
        floor = std::max(floor, 5.0 * (rs.uncert[static_cast<std::size_t>(i)] +
                                       rs.uncert[static_cast<std::size_t>(j)]));
      if (sep < floor) throw DegenerateRoots("roots too close for Widom coefficients");
    }

  WidomExpansion ex;
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;

  const cplx sign = (size % 2 == 0) ? cplx(1.0) : cplx(-1.0);
  const cplx ap = a.coeff(a.p());
  double best = -std::numeric_limits<double>::infinity();

  auto emit = [&](const std::vector<int>& M) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (int j : M) in[static_cast<std::size_t>(j)] = true;
    cplx w = sign * ap;
    double logw = std::log(std::abs(ap));
    cplx c = 1.0;
    for (int j : M) {
      cplx zj = rs.roots[static_cast<std::size_t>(j)];
      w *= zj;
      logw += std::log(std::abs(zj));
      for (int e = 0; e < rs.q + k; ++e) c *= zj;
      for (int l = 0; l < n; ++l)
        if (!in[static_cast<std::size_t>(l)]) c /= zj - rs.roots[static_cast<std::size_t>(l)];
    }
    ex.terms.push_back({M, w, c, logw});
    if (logw > best) {
      best = logw;
      ex.dominant = static_cast<int>(ex.terms.size()) - 1;
    }
  };

  // enumerate size-combinations of {0..n-1} in lexicographic order
  if (size == 0) {
    emit({});
    return ex;
  }
  for (;;) {
    emit(idx);
    int i = size - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return ex;
}

inline WidomExpansion widom_terms(const LaurentSymbol& a, int k, cplx lambda,
                                  double sep_tol = 1e-8) {
  RootSystem rs = roots_at(a, lambda);
  return widom_terms(a, rs, k, sep_tol);
}

}  // namespace btoep
