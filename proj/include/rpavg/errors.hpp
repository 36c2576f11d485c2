#pragma once

#include <stdexcept>
#include <string>

namespace rpavg {

// Status codes shared with the C API (see rpavg.h).
enum class ErrorCode : int {
  kParameter = 1,
  kRange = 2,
  kConfiguration = 3,
  kSize = 4,
  kArgument = 5,
  kIo = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Invalid distribution or kernel parameters.
struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error(ErrorCode::kParameter, w) {}
};

// A value outside the representable range. Carries the largest admissible
// index when the failure comes from subsequence growth.
struct RangeError : Error {
  RangeError(const std::string& w, long long largest_admissible = -1)
      : Error(ErrorCode::kRange, w), largest_admissible_index(largest_admissible) {}
  long long largest_admissible_index;
};

struct ConfigurationError : Error {
  explicit ConfigurationError(const std::string& w) : Error(ErrorCode::kConfiguration, w) {}
};

// Grid or enumeration too large for the configured budget.
struct SizeError : Error {
  SizeError(const std::string& w, double suggested = 0.0)
      : Error(ErrorCode::kSize, w), suggested_spacing(suggested) {}
  double suggested_spacing;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorCode::kArgument, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::kIo, w) {}
};

}  // namespace rpavg
