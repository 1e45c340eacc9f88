#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetinv {

/// Coarse error families. The CLI maps these directly onto its exit codes.
enum class ErrorFamily {
  Parse = 1,
  Domain = 2,
  Resource = 3,
  Verification = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorFamily family, std::string kind, const std::string &what)
      : std::runtime_error(what), family_(family), kind_(std::move(kind)) {}

  ErrorFamily family() const noexcept { return family_; }
  /// Stable identifier, e.g. "SyntaxError" or "TrivializableBranch".
  const std::string &kind() const noexcept { return kind_; }

private:
  ErrorFamily family_;
  std::string kind_;
};

#define JETINV_DEFINE_ERROR(Name, Family)                                      \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what)                                     \
        : Error(ErrorFamily::Family, #Name, what) {}                           \
  };

JETINV_DEFINE_ERROR(DependsOnJetVariables, Parse)
JETINV_DEFINE_ERROR(NonRationalOperation, Domain)
JETINV_DEFINE_ERROR(DivisionByZero, Domain)
JETINV_DEFINE_ERROR(DomainError, Domain)
JETINV_DEFINE_ERROR(OverflowError, Domain)
JETINV_DEFINE_ERROR(SamplingExhausted, Domain)
JETINV_DEFINE_ERROR(TrivializableBranch, Domain)
JETINV_DEFINE_ERROR(DegenerateFrame, Domain)
JETINV_DEFINE_ERROR(InverseMismatch, Domain)
JETINV_DEFINE_ERROR(DegreeOverflow, Domain)
JETINV_DEFINE_ERROR(PreconditionViolated, Domain)
JETINV_DEFINE_ERROR(InvalidArgument, Domain)
JETINV_DEFINE_ERROR(ExpressionTooLarge, Resource)

#undef JETINV_DEFINE_ERROR

/// Parse failure with a 0-based offset into the source plus line/column.
class SyntaxError : public Error {
public:
  SyntaxError(const std::string &message, std::size_t offset, std::size_t line,
              std::size_t column)
      : SyntaxError("SyntaxError", message, offset, line, column) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

protected:
  SyntaxError(std::string kind, const std::string &message, std::size_t offset,
              std::size_t line, std::size_t column)
      : Error(ErrorFamily::Parse, std::move(kind),
              message + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        offset_(offset), line_(line), column_(column) {}

private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

class UnknownSymbol : public SyntaxError {
public:
  UnknownSymbol(const std::string &message, std::size_t offset,
                std::size_t line, std::size_t column)
      : SyntaxError("UnknownSymbol", message, offset, line, column) {}
};

/// Exponent that is not an integer or a quotient of integers.
class BadExponent : public SyntaxError {
public:
  BadExponent(const std::string &message, std::size_t offset, std::size_t line,
              std::size_t column)
      : SyntaxError("BadExponent", message, offset, line, column) {}
};

} // namespace jetinv
