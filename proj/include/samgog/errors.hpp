#pragma once

#include <stdexcept>
#include <string>

namespace samgog {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but is internally inconsistent (e.g. an edge crossing graphs).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Requested quantity cannot be realised with the available data.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Training diverged (non-finite loss or gradient).
class TrainingError : public Error {
 public:
  using Error::Error;
};

// A quantity is undefined on the given input (zero row sum, empty class, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace samgog
