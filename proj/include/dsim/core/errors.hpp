#pragma once

#include <stdexcept>
#include <string>

namespace dsim {

// Base of every error raised by the library. Callers that only care about
// "model failed" catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DSIM_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

// core
DSIM_DEFINE_ERROR(HorizonInvalid);
DSIM_DEFINE_ERROR(HorizonExceeded);
DSIM_DEFINE_ERROR(LabelEmpty);

// genesis
DSIM_DEFINE_ERROR(DelayInvalid);

// finance
DSIM_DEFINE_ERROR(NoCandidates);

// selection
DSIM_DEFINE_ERROR(NotFinanced);
DSIM_DEFINE_ERROR(RegionMismatch);
DSIM_DEFINE_ERROR(TraceTooShort);
DSIM_DEFINE_ERROR(NonPositiveProductivity);

// scenario
DSIM_DEFINE_ERROR(UnknownPreset);
DSIM_DEFINE_ERROR(LengthMismatch);
DSIM_DEFINE_ERROR(AllMassExcluded);

// montecarlo
DSIM_DEFINE_ERROR(ThetaListInvalid);

#undef DSIM_DEFINE_ERROR

// Malformed scenario text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed text that violates the schema. `path()` names the offending key.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error("schema error at '" + path + "': " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dsim
