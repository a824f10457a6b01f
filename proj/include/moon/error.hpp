#pragma once

#include <stdexcept>
#include <string>

namespace moon {

enum class ErrorKind {
  Domain,
  Pole,
  UnreachableMagnification,
  Validation,
  ArgumentOrder,
  BehindCamera,
  Configuration,
  Sequencing,
  SessionOver,
  NotReady,
  NotFound,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

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

}  // namespace moon
