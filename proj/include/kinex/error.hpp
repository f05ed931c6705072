#pragma once

#include <stdexcept>
#include <string>

namespace kinex {

/// Failure categories shared by every module. The numeric values are the
/// status codes returned through the C API (see kinex.h).
enum class ErrorCode : int {
  invalid_argument = 1,
  domain = 2,
  config = 3,
  data = 4,
  stability = 5,
  range = 6,
  undefined = 7,
  io = 8,
  invalid_pair = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::config: return "config error";
    case ErrorCode::data: return "data error";
    case ErrorCode::stability: return "stability error";
    case ErrorCode::range: return "range error";
    case ErrorCode::undefined: return "undefined result";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::invalid_pair: return "invalid pair";
  }
  return "unknown error";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace kinex
