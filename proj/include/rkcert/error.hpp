#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rkcert {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero in prime field") {}
};

class ModulusMismatch : public Error {
 public:
  ModulusMismatch(std::uint64_t a, std::uint64_t b)
      : Error("field elements from different moduli: " + std::to_string(a) +
              " vs " + std::to_string(b)) {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class EmptySampleSet : public Error {
 public:
  EmptySampleSet() : Error("sample set is empty") {}
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rkcert
