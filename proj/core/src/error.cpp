#include "linser/error.hpp"

namespace linser {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unsupported_space: return "unsupported-space";
    case ErrorCode::empty_series: return "empty-series";
    case ErrorCode::unsupported_series: return "unsupported-series";
    case ErrorCode::not_radial: return "not-radial";
    case ErrorCode::degenerate_gram: return "degenerate-gram";
    case ErrorCode::base_locus: return "base-locus";
    case ErrorCode::internal_error: return "internal-error";
    case ErrorCode::discretization_failure: return "discretization-failure";
    case ErrorCode::invalid_envelope: return "invalid-envelope";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace linser
