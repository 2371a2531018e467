#pragma once

#include <stdexcept>
#include <string>

namespace splitkit {

enum class ErrorCode {
  InvalidArgument = 1,
  ShapeMismatch = 2,
  ZeroDiagonal = 3,
  Parse = 4,
  Io = 5,
  CapExceeded = 6,
  Diverged = 7,
  NotConverged = 8,
  Internal = 9,
};

// Every failure raised by the core carries one of the codes above so the C
// boundary can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace splitkit
