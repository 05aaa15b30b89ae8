#pragma once

#include <stdexcept>
#include <string>

namespace bwkb {

// Numeric values are shared with the C API (see bwkb.h).
enum class ErrorCode {
  invalid_argument = 1,
  out_of_range = 2,
  non_convergence = 3,
  flat_band = 4,
  band_gap_query = 5,
  degenerate = 6,
  caustic = 7,
  instability = 8,
  io = 9,
  schema = 10,
  unsupported = 11,
  validation_failed = 12,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace bwkb
