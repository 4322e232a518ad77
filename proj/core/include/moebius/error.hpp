#pragma once

#include <stdexcept>
#include <string>

namespace moebius {

// Failure classes. The CLI maps them to exit codes 1, 2 and 3.
enum class ErrorKind {
  kInvalidInput,
  kSingularity,     // infinite energy, double points, non-embedded input
  kNonConvergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}
[[noreturn]] inline void fail_singular(const std::string& what) {
  throw Error(ErrorKind::kSingularity, what);
}
[[noreturn]] inline void fail_convergence(const std::string& what) {
  throw Error(ErrorKind::kNonConvergence, what);
}

}  // namespace moebius
