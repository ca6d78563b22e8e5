#pragma once

#include <stdexcept>
#include <string>

namespace gbq {

// Numeric values are shared with the C API status codes in gbq.h.
enum class ErrorCode : int {
  invalid_argument = 1,
  grid_mismatch = 2,
  ill_defined = 3,
  not_converged = 4,
  blowup_suspected = 5,
  io = 6,
  out_of_range = 7,
  parse = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what, ErrorCode code = ErrorCode::invalid_argument) {
  if (!cond) fail(code, what);
}

}  // namespace gbq
