#pragma once

#include <stdexcept>
#include <string>

namespace hypcover {

// Error classes, one per failure family. The CLI maps each to its own exit code.
enum class ErrorKind {
  InvalidElement,
  NonTermination,
  Calibration,
  InvalidSize,
  NotConnected,
  IncompatibleCharacter,
  Numeric,
  Mesh,
  Assembly,
  Precondition,
  Overflow,
  InvalidBand,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hypcover
