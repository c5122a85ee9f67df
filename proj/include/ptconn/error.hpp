#pragma once

#include <stdexcept>
#include <string>

namespace ptconn {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero") {}
};

struct FieldMismatch : Error {
  FieldMismatch() : Error("operands belong to different fields") {}
};

struct RingMismatch : Error {
  RingMismatch() : Error("operands belong to different chart rings") {}
};

struct NotAUnit : Error {
  explicit NotAUnit(const std::string& what) : Error("not a unit: " + what) {}
};

struct UnsupportedField : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct DegreeOverflow : Error {
  DegreeOverflow() : Error("form degree exceeds 2") {}
  explicit DegreeOverflow(const std::string& what) : Error(what) {}
};

struct InvalidCocycle : Error {
  using Error::Error;
};

struct GluingFailure : Error {
  using Error::Error;
};

struct IllDefinedMap : Error {
  using Error::Error;
};

struct StabilityFailure : Error {
  using Error::Error;
};

struct NotCoprime : Error {
  NotCoprime() : Error("torsion order is divisible by the characteristic") {}
  explicit NotCoprime(const std::string& what) : Error(what) {}
};

struct InvalidInput : Error {
  using Error::Error;
};

}  // namespace ptconn
