#pragma once

#include <stdexcept>
#include <string>

namespace isr {

/// Broad failure category. Maps one-to-one onto the C API status codes and
/// the CLI exit codes.
enum class ErrorKind {
  Invalid,  // precondition violated by the caller
  Config,   // malformed or missing configuration
  Data,     // malformed or inconsistent input data
  Plugin,   // external classifier process failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace isr
