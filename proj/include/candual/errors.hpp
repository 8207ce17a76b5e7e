#pragma once

#include <stdexcept>
#include <string>

namespace candual {

// Base class for all domain errors raised by this library.  Plain parameter
// validation (non-positive moduli, bad grid sizes, ...) throws
// std::invalid_argument instead; everything below signals a condition that is
// meaningful for the model rather than a malformed call.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 2*mu >= nu*alpha^2: the stored energy has no double-well structure and the
// dual machinery does not apply.
struct NotDoubleWell : Error {
  using Error::Error;
};

// Evaluation of the dual function at sigma == -mu with a nonzero load.
struct PoleAtMinusMu : Error {
  using Error::Error;
};

// A root bracket could not be established (or expanded) for the dual equation.
struct BracketFailure : Error {
  using Error::Error;
};

// A scan interval straddles the dual pole at -mu where the scanned function
// is undefined.
struct IntervalContainsPole : Error {
  using Error::Error;
};

// The requested dual branch has no root in the current regime.
struct BranchUnavailable : Error {
  using Error::Error;
};

// A quadrature node of a dual field sits exactly on the pole at -mu.
struct NodeAtPole : Error {
  using Error::Error;
};

// Lp norms of two fields with different exponents were combined.
struct ExponentMismatch : Error {
  using Error::Error;
};

// Blow-up slope gamma outside (0, (nu*alpha^2/2 - mu)/(b - a)).
struct GammaOutOfRange : Error {
  using Error::Error;
};

// An operation that requires a specific radial regime was invoked in another
// one (for example a perturbation ladder outside the three-branch case).
struct WrongRegime : Error {
  using Error::Error;
};

}  // namespace candual
