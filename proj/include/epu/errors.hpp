#pragma once

#include <stdexcept>
#include <string>

namespace epu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No type of length N has the requested total energy.
class UnattainableEnergy : public Error {
 public:
  using Error::Error;
};

/// Two type vectors (or a type vector and a spectrum) disagree on d.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A dense construction would exceed the configured Hilbert-space cap.
class DimensionCap : public Error {
 public:
  using Error::Error;
};

/// Target energy is outside the open interval (E_0, E_{d-1}), or a thermal
/// comparison was requested for an extremal shell.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Operands of a metric or channel have incompatible shapes.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

/// The requested check needs d >= 3.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace epu
