#pragma once

#include <stdexcept>
#include <string>

namespace klshell {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KLSHELL_ERROR(Name)              \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

KLSHELL_ERROR(DegenerateTangents)
KLSHELL_ERROR(DegenerateLayer)
KLSHELL_ERROR(NonPositiveLayerJacobian)
KLSHELL_ERROR(ConstitutiveOverflow)
KLSHELL_ERROR(InvalidMaterial)
KLSHELL_ERROR(OutOfDomain)
KLSHELL_ERROR(InvalidDimensions)
KLSHELL_ERROR(DegenerateElement)
KLSHELL_ERROR(SingularTangent)

#undef KLSHELL_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace klshell
