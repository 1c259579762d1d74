#pragma once

#include <stdexcept>
#include <string>

namespace specslice {

enum class ErrorCode {
  config = 1,
  data = 2,
  numeric = 3,
  undefined = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A metric whose defining ratio has an empty denominator.
class UndefinedMetric : public Error {
 public:
  explicit UndefinedMetric(const std::string& message)
      : Error(ErrorCode::undefined, message) {}
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace specslice
