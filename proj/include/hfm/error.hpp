#pragma once

#include <stdexcept>
#include <string>

namespace hfm {

// Stable error categories; the CLI maps them to exit codes and to the
// "code" field of the machine-readable error object.
enum class ErrorCode {
  ConfigError,          // bad flags, bad manifest, invalid parameters
  DataError,            // malformed or inconsistent input data
  DegenerateAttribute,  // a sensitive attribute with a single value
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  const char* code_string() const noexcept {
    switch (code_) {
      case ErrorCode::ConfigError: return "config_error";
      case ErrorCode::DataError: return "data_error";
      case ErrorCode::DegenerateAttribute: return "degenerate_attribute";
    }
    return "unknown";
  }

  int exit_code() const noexcept {
    switch (code_) {
      case ErrorCode::ConfigError: return 2;
      case ErrorCode::DataError: return 3;
      case ErrorCode::DegenerateAttribute: return 4;
    }
    return 1;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCode::ConfigError, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorCode::DataError, msg);
}
[[noreturn]] inline void throw_degenerate(const std::string& msg) {
  throw Error(ErrorCode::DegenerateAttribute, msg);
}

}  // namespace hfm
