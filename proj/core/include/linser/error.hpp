#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linser {

enum class ErrorCode {
  invalid_argument,
  unsupported_space,
  empty_series,
  unsupported_series,
  not_radial,
  degenerate_gram,
  base_locus,
  internal_error,
  discretization_failure,
  invalid_envelope,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace linser
