#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citymesh {

// Base for every error the library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed OBJ input. Carries the 1-based line number of the offending record.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Out-of-domain argument (seed index, weight, precision, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

// Triangle with no defined normal.
class DegenerateFaceError : public Error {
public:
  using Error::Error;
};

// Two values that must describe the same mesh do not.
class MeshMismatchError : public Error {
public:
  using Error::Error;
};

} // namespace citymesh
