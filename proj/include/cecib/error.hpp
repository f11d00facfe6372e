#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cecib {

enum class ErrorKind {
  InvalidInput,    // malformed arguments, dimension mismatch
  EmptyCluster,    // removing from / evaluating an empty cluster
  DegenerateModel, // covariance not positive definite, too few points
  Configuration,   // invalid FitConfig / manifest / CLI options
  Parse,           // CSV or report document syntax
  Precondition,    // documented precondition of an operation violated
  Unsupported,     // operation called outside its supported setting
  Io,              // file system failures
};

std::string_view to_string(ErrorKind kind) noexcept;

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

}  // namespace cecib
