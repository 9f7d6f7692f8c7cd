#pragma once

#include <stdexcept>
#include <string>

namespace krein {

// Root of every error raised by the library. Catch this at process
// boundaries; catch the leaves where the caller can recover.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// z lies within the singularity guard of an eigenvalue of H.
class SpectrumHit : public Error {
 public:
  using Error::Error;
};

// A parameter is outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularBlock : public Error {
 public:
  using Error::Error;
};

// Θ + M_z could not be inverted at the requested point.
class ThetaSingular : public Error {
 public:
  using Error::Error;
};

class NotBelowThreshold : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Two independent evaluation paths disagreed beyond tolerance.
class InternalMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownFamily : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace krein
