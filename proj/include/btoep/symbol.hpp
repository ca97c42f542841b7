#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "btoep/common.hpp"
#include "btoep/errors.hpp"
#include "btoep/polyroots.hpp"

namespace btoep {

/// Laurent polynomial a(z) = sum_{k=-q}^{p} a_k z^k with a_p, a_{-q} != 0,
/// p, q >= 1 and gcd{ k : a_k != 0 } = 1.
class LaurentSymbol {
 public:
  int p() const { return p_; }
  int q() const { return q_; }
  int span() const { return p_ + q_; }

  /// a_k for k in [-q, p]; zero outside.
  cplx coeff(int k) const {
    if (k < -q_ || k > p_) return 0.0;
    return c_[static_cast<std::size_t>(k + q_)];
  }

  /// max |a_k|, used as the magnitude scale for tolerances.
  double scale() const { return scale_; }

  cplx evaluate(cplx z) const {
    if (z == cplx(0.0, 0.0)) throw ZeroArgument("symbol evaluated at z = 0");
    // Horner on the polynomial part, Horner in 1/z on the principal part.
    cplx pos = 0.0;
    for (int k = p_; k >= 1; --k) pos = (pos + coeff(k)) * z;
    cplx w = 1.0 / z;
    cplx neg = 0.0;
    for (int k = -q_; k <= -1; ++k) neg = (neg + coeff(k)) * w;
    return pos + neg + coeff(0);
  }

  cplx derivative(cplx z) const {
    if (z == cplx(0.0, 0.0)) throw ZeroArgument("symbol derivative at z = 0");
    cplx pos = 0.0;
    for (int k = p_; k >= 2; --k) pos = (pos + double(k) * coeff(k)) * z;
    pos += coeff(1);
    cplx w = 1.0 / z;
    cplx inner = 0.0;
    for (int k = -q_; k <= -1; ++k) inner = (inner + double(k) * coeff(k)) * w;
    return pos + inner * w;  // inner*w collects the k a_k z^{k-1}, k < 0 terms
  }

  /// Ascending coefficients of z^q (a(z) - lambda), degree p+q.
  std::vector<cplx> shifted_poly(cplx lambda) const {
    std::vector<cplx> out(static_cast<std::size_t>(span() + 1));
    for (int j = 0; j <= span(); ++j) out[static_cast<std::size_t>(j)] = coeff(j - q_);
    out[static_cast<std::size_t>(q_)] -= lambda;
    return out;
  }

  /// Ascending coefficients of z^{q+1} a'(z), degree p+q with nonzero
  /// constant term; its roots are the critical points of the symbol.
  std::vector<cplx> critical_poly() const {
    std::vector<cplx> out(static_cast<std::size_t>(span() + 1));
    for (int j = 0; j <= span(); ++j) out[static_cast<std::size_t>(j)] = double(j - q_) * coeff(j - q_);
    return out;
  }

  friend LaurentSymbol parse_symbol(const std::map<int, cplx>& spec);

 private:
  int p_ = 0, q_ = 0;
  std::vector<cplx> c_;  // c_[j] = a_{j-q}
  double scale_ = 0.0;
};

/// Validates a coefficient map into a symbol. Exact-zero extreme
/// coefficients are trimmed before p and q are fixed.
inline LaurentSymbol parse_symbol(const std::map<int, cplx>& spec) {
  int lo = 0, hi = 0;
  bool any = false;
  for (const auto& [k, v] : spec) {
    if (std::abs(v) == 0.0) continue;
    if (!any) {
      lo = hi = k;
      any = true;
    } else {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  if (!any) throw ExtremeCoefficientZero("all coefficients vanish");
  if (hi < 1 || lo > -1) throw DegenerateRange("symbol requires p >= 1 and q >= 1");

  LaurentSymbol a;
  a.p_ = hi;
  a.q_ = -lo;
  a.c_.assign(static_cast<std::size_t>(a.span() + 1), cplx(0.0, 0.0));
  int g = 0;
  for (const auto& [k, v] : spec) {
    if (k < lo || k > hi || std::abs(v) == 0.0) continue;
    a.c_[static_cast<std::size_t>(k + a.q_)] = v;
    a.scale_ = std::max(a.scale_, std::abs(v));
    if (k != 0) g = std::gcd(g, std::abs(k));
  }
  if (std::abs(a.c_.front()) == 0.0 || std::abs(a.c_.back()) == 0.0)
    throw ExtremeCoefficientZero("extreme coefficient is zero");
  if (g != 1) throw GcdViolation("gcd of nonzero coefficient offsets is not 1");
  return a;
}

/// The p+q branch points a(z*) over the critical points z* of the symbol,
/// counted with multiplicity and sorted lexicographically by (re, im).
/// Values closer than 1e-8 relative to the largest magnitude are clustered
/// to a common representative.
inline std::vector<cplx> branch_points(const LaurentSymbol& a) {
  std::vector<cplx> crit = poly_roots(a.critical_poly());
  std::vector<cplx> lam(crit.size());
  for (std::size_t i = 0; i < crit.size(); ++i) lam[i] = a.evaluate(crit[i]);

  double big = 0.0;
  for (cplx l : lam) big = std::max(big, std::abs(l));
  const double tol = 1e-8 * std::max(big, 1e-300);

  // greedy clustering: assign each value to the first representative in range
  std::vector<cplx> reps;
  std::vector<int> counts;
  std::vector<int> assign(lam.size(), -1);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    int hit = -1;
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (std::abs(lam[i] - reps[r]) <= tol) {
        hit = static_cast<int>(r);
        break;
      }
    if (hit < 0) {
      reps.push_back(lam[i]);
      counts.push_back(1);
      assign[i] = static_cast<int>(reps.size()) - 1;
    } else {
      // running mean keeps the representative centered
      reps[static_cast<std::size_t>(hit)] =
          (reps[static_cast<std::size_t>(hit)] * double(counts[static_cast<std::size_t>(hit)]) + lam[i]) /
          double(counts[static_cast<std::size_t>(hit)] + 1);
      ++counts[static_cast<std::size_t>(hit)];
      assign[i] = hit;
    }
  }
  std::vector<cplx> out;
  out.reserve(lam.size());
  for (std::size_t r = 0; r < reps.size(); ++r)
    out.insert(out.end(), static_cast<std::size_t>(counts[r]), reps[r]);
  std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

/// Distinct branch points (clustered representatives) with multiplicities.
inline std::vector<std::pair<cplx, int>> branch_points_unique(const LaurentSymbol& a) {
  std::vector<cplx> all = branch_points(a);
  std::vector<std::pair<cplx, int>> out;
  for (cplx l : all) {
    if (!out.empty() && out.back().first == l)
      ++out.back().second;
    else
      out.emplace_back(l, 1);
  }
  return out;
}

}  // namespace btoep
