#pragma once

#include <stdexcept>
#include <string>

namespace fpsub {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A B-matrix has nonzero entries outside the base algebra's pattern.
class PatternError : public Error {
 public:
  using Error::Error;
};

/// Inversion refused: condition estimate above the configured bound.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the region where a series or iteration is valid.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Word length or partition size above a configured cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class UnknownElement : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario text; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Well-formed scenario with an invalid or missing field; `field` is the
/// dotted path (e.g. "x1.bound", "points[2]").
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// "<kind>: <message>", the reason carried by failed check reports.
inline std::string describe_error(const std::exception& e) {
  const char* kind = "error";
  if (dynamic_cast<const DomainError*>(&e)) kind = "domain error";
  else if (dynamic_cast<const ConvergenceError*>(&e)) kind = "convergence error";
  else if (dynamic_cast<const SingularError*>(&e)) kind = "singular";
  else if (dynamic_cast<const CapExceeded*>(&e)) kind = "cap exceeded";
  else if (dynamic_cast<const DimensionError*>(&e)) kind = "dimension error";
  else if (dynamic_cast<const PatternError*>(&e)) kind = "pattern error";
  else if (dynamic_cast<const UnknownElement*>(&e)) kind = "unknown element";
  return std::string(kind) + ": " + e.what();
}

}  // namespace fpsub
