#pragma once

#include <stdexcept>
#include <string>

namespace lpstab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input data: bad tables, bad files, duplicate entries.
struct FormatError : Error {
  using Error::Error;
};

/// Distance data violating the metric axioms.
struct InvalidMetricError : Error {
  using Error::Error;
};

/// Dimension mismatch between operands.
struct ShapeError : Error {
  using Error::Error;
};

/// Operation requires structure the operand lacks (square indexing, lattice
/// group structure, symmetry).
struct StructureError : Error {
  using Error::Error;
};

/// Out-of-range or inconsistent parameters (bad p, L below thickness,
/// propagation step too large).
struct ParameterError : Error {
  using Error::Error;
};

/// Zero or otherwise degenerate input where a nonzero one is required.
struct DegenerateInputError : Error {
  using Error::Error;
};

/// Window too large for the dense path.
struct CapacityError : Error {
  using Error::Error;
};

/// Generator cannot satisfy the requested structural constraints.
struct FeasibilityError : Error {
  using Error::Error;
};

/// Supplied approximant family violates its advertised decay bound.
struct DecayViolationError : Error {
  DecayViolationError(const std::string& what, double measured, double allowed)
      : Error(what), measured_norm(measured), allowed_bound(allowed) {}
  double measured_norm;
  double allowed_bound;
};

/// The matrix is numerically rank deficient; carries the offending value.
struct NotBoundedBelowError : Error {
  NotBoundedBelowError(const std::string& what, double smin)
      : Error(what), sigma_min(smin) {}
  double sigma_min;
};

}  // namespace lpstab
