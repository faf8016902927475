#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hypo {

using Complex = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation does not hold.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands built on different bases or with different dimensions.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

/// A numerical method failed to factor, converge, or stay finite.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A stochastic simulation blew up or produced too little data.
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// A grid probe cannot be evaluated (empty ensemble, boundary leakage).
class ProbeError : public Error {
 public:
  using Error::Error;
};

/// A spectral enclosure cannot be fitted to the given points.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace hypo
