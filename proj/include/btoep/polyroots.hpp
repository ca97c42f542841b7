#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"

namespace btoep {

struct PolyRootOptions {
  double tol = 1e-13;  // residual tolerance relative to the polynomial scale
  int max_iter = 200;
  int restarts = 3;
};

namespace detail {

/// Value and derivative of sum c[j] z^j by a single Horner pass.
inline void horner2(const std::vector<cplx>& c, cplx z, cplx& v, cplx& dv) {
  v = c.back();
  dv = 0.0;
  for (int j = static_cast<int>(c.size()) - 2; j >= 0; --j) {
    dv = dv * z + v;
    v = v * z + c[static_cast<std::size_t>(j)];
  }
}

/// sum |c[j]| |z|^j, the natural magnitude scale of the evaluation.
inline double horner_scale(const std::vector<cplx>& c, cplx z) {
  double az = std::abs(z);
  double s = std::abs(c.back());
  for (int j = static_cast<int>(c.size()) - 2; j >= 0; --j)
    s = s * az + std::abs(c[static_cast<std::size_t>(j)]);
  return s;
}

}  // namespace detail

/// Aberth-Ehrlich simultaneous iteration for all roots of the polynomial
/// with ascending coefficients c. Optional initial guesses in hint.
/// Multiple roots converge to residual tolerance as a cluster of simple
/// approximations. Throws RootSolverFailure when the iteration cap is hit.
inline std::vector<cplx> poly_roots(std::vector<cplx> c, const PolyRootOptions& opts = {},
                                    const std::vector<cplx>* hint = nullptr) {
  // strip exactly-zero leading coefficients
  while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return {};

  // roots at the origin: strip exactly-zero trailing coefficients
  std::size_t zero_roots = 0;
  while (zero_roots < static_cast<std::size_t>(d) && std::abs(c[zero_roots]) == 0.0) ++zero_roots;
  if (zero_roots > 0) c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zero_roots));
  const int m = static_cast<int>(c.size()) - 1;

  std::vector<cplx> z(static_cast<std::size_t>(m));
  double cmax = 0.0;
  for (const cplx& cj : c) cmax = std::max(cmax, std::abs(cj));
  for (cplx& cj : c) cj /= cmax;

  auto initialize = [&](int attempt) {
    if (hint && static_cast<int>(hint->size()) == m && attempt == 0) {
      for (int i = 0; i < m; ++i) {
        cplx h = (*hint)[static_cast<std::size_t>(i)];
        z[static_cast<std::size_t>(i)] = finite(h) ? h : cplx(0.3 * i + 0.1, 0.2);
      }
      return;
    }
    double r0 = std::pow(std::abs(c.front() / c.back()), 1.0 / m);
    if (!(r0 > 0.0) || !std::isfinite(r0)) r0 = 1.0;
    double offset = 0.5731 + 0.9151 * attempt;
    for (int i = 0; i < m; ++i) {
      double th = 2.0 * pi * i / m + offset + 0.07 * i / m;
      z[static_cast<std::size_t>(i)] = r0 * cplx(std::cos(th), std::sin(th));
    }
  };

  int start_attempt = 0;
  for (int attempt = start_attempt; attempt <= opts.restarts; ++attempt) {
    initialize(attempt);
    bool ok = false;
    for (int it = 0; it < opts.max_iter && !ok; ++it) {
      double max_step = 0.0;
      ok = true;
      for (int i = 0; i < m; ++i) {
        cplx zi = z[static_cast<std::size_t>(i)];
        cplx v, dv;
        detail::horner2(c, zi, v, dv);
        double scale = detail::horner_scale(c, zi);
        if (std::abs(v) <= opts.tol * scale) continue;
        ok = false;
        if (std::abs(dv) == 0.0) {
          z[static_cast<std::size_t>(i)] = zi + cplx(1e-8, 2e-8) * (1.0 + std::abs(zi));
          continue;
        }
        cplx newton = v / dv;
        cplx repel = 0.0;
        for (int j = 0; j < m; ++j) {
          if (j == i) continue;
          cplx diff = zi - z[static_cast<std::size_t>(j)];
          if (std::abs(diff) == 0.0) diff = cplx(1e-14, 1e-14) * (1.0 + std::abs(zi));
          repel += 1.0 / diff;
        }
        cplx denom = 1.0 - newton * repel;
        cplx step = std::abs(denom) > 1e-14 ? newton / denom : newton;
        if (!finite(step)) step = newton;
        z[static_cast<std::size_t>(i)] = zi - step;
        max_step = std::max(max_step, std::abs(step));
      }
      if (!ok && max_step < 1e-17) break;  // stagnated below double resolution
    }
    if (ok) {
      std::vector<cplx> out(z.begin(), z.end());
      out.insert(out.end(), zero_roots, cplx(0.0, 0.0));
      return out;
    }
  }
  throw RootSolverFailure("polynomial root iteration did not converge");
}

}  // namespace btoep
