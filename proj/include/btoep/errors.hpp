#pragma once

#include <stdexcept>
#include <string>

namespace btoep {

/// Base class for every validation or numerical failure raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define BTOEP_ERROR_TYPE(NAME) \
  struct NAME : Error {        \
    using Error::Error;        \
  };

// symbol
BTOEP_ERROR_TYPE(ExtremeCoefficientZero)
BTOEP_ERROR_TYPE(GcdViolation)
BTOEP_ERROR_TYPE(DegenerateRange)
BTOEP_ERROR_TYPE(ZeroArgument)
// roots
BTOEP_ERROR_TYPE(RootSolverFailure)
BTOEP_ERROR_TYPE(OnCurve)
BTOEP_ERROR_TYPE(DegenerateRoot)
BTOEP_ERROR_TYPE(DegenerateRoots)
// curves
BTOEP_ERROR_TYPE(SeedingFailure)
BTOEP_ERROR_TYPE(RefinementFailure)
BTOEP_ERROR_TYPE(AmbiguousMatching)
// measures
BTOEP_ERROR_TYPE(NearSingularity)
BTOEP_ERROR_TYPE(NegativeDensity)
BTOEP_ERROR_TYPE(MassMismatch)
BTOEP_ERROR_TYPE(SupportCollision)
BTOEP_ERROR_TYPE(IndexOutOfRange)
// toeplitz
BTOEP_ERROR_TYPE(InterpolationConditioning)
// potential
BTOEP_ERROR_TYPE(AdmissibilityViolation)
// convergence
BTOEP_ERROR_TYPE(ProbeOnCurve)
// cli
BTOEP_ERROR_TYPE(UsageError)

#undef BTOEP_ERROR_TYPE

}  // namespace btoep
