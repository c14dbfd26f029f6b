#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace waggle {

// Every failure the library reports carries one of these categories.
enum class ErrorKind {
  EmptyWindow,
  InvalidWindow,
  TooShort,
  InvalidAngle,
  OutOfOrder,
  TooFewRows,
  DegenerateLabels,
  InvalidInput,
  ConvergenceFailure,
  UnsupportedVersion,
  ParseError,
  InvalidK,
  ShapeError,
  DegenerateFold,
  InvalidSpec,
  InvalidLabel,
  GapError,
  InvalidConfig,
  Io,
};

inline constexpr ErrorKind kAllErrorKinds[] = {
    ErrorKind::EmptyWindow,        ErrorKind::InvalidWindow,
    ErrorKind::TooShort,           ErrorKind::InvalidAngle,
    ErrorKind::OutOfOrder,         ErrorKind::TooFewRows,
    ErrorKind::DegenerateLabels,   ErrorKind::InvalidInput,
    ErrorKind::ConvergenceFailure, ErrorKind::UnsupportedVersion,
    ErrorKind::ParseError,         ErrorKind::InvalidK,
    ErrorKind::ShapeError,         ErrorKind::DegenerateFold,
    ErrorKind::InvalidSpec,        ErrorKind::InvalidLabel,
    ErrorKind::GapError,           ErrorKind::InvalidConfig,
    ErrorKind::Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::InvalidAngle: return "InvalidAngle";
    case ErrorKind::OutOfOrder: return "OutOfOrder";
    case ErrorKind::TooFewRows: return "TooFewRows";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::DegenerateFold: return "DegenerateFold";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::GapError: return "GapError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Exception type thrown by all waggle operations.
///
/// `position()` holds the context-dependent location of the failure: a sample
/// index, a 1-based line number, a byte offset, a fold id or a class-pair id,
/// depending on the kind. It is `npos` when no location applies.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorKind kind, const std::string& message, std::size_t position = npos)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

}  // namespace waggle
