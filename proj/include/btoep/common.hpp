#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace btoep {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

inline double sq(double x) { return x * x; }

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Unit complex number in the direction of z (1 for z = 0).
inline cplx unitize(cplx z) {
  double m = std::abs(z);
  return m > 0 ? z / m : cplx(1.0, 0.0);
}

}  // namespace btoep
