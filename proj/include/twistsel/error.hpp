#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twistsel {

enum class ErrorCode {
  InvalidAngle,
  InvalidScene,
  InvalidConfig,
  TraceOrder,
  EmptyTrace,
  InvalidTask,
  EmptyAggregate,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported with this exception type. The code is
/// stable and suitable for mapping to exit codes or wire error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TraceOrder: return "TraceOrder";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::InvalidTask: return "InvalidTask";
    case ErrorCode::EmptyAggregate: return "EmptyAggregate";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace twistsel
