#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace beamroam {

enum class ErrorCode {
  kWindowOutsideTrace,
  kDegenerateWindow,
  kInvalidTrace,
  kInvalidLayout,
  kZeroDistance,
  kDegeneratePair,
  kInsufficientSamples,
  kNonFinite,
  kZeroDirection,
  kZeroSpeed,
  kZeroDenominator,
  kInvalidScenario,
  kMismatchedScenarios,
  kParseError,
  kValidationError,
  kIoError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by scenario loading; `field` is the dotted path of the offending
/// key and `line` is 0 when not applicable.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string field, int line, const std::string& what)
      : Error(code, what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace beamroam
