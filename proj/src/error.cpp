#include "hetassoc/error.hpp"

namespace hetassoc {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::validation: return "validation";
    case ErrorCode::size: return "size";
    case ErrorCode::dependence_order: return "dependence_order";
    case ErrorCode::degenerate_data: return "degenerate_data";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::estimation_failure: return "estimation_failure";
    case ErrorCode::degenerate_joint: return "degenerate_joint";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::assumption_violation: return "assumption_violation";
    case ErrorCode::division: return "division";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::degenerate_variance: return "degenerate_variance";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::domain: return "domain";
    case ErrorCode::oracle_failure: return "oracle_failure";
    case ErrorCode::coverage: return "coverage";
  }
  return "unknown";
}

bool Error::is_input_error() const noexcept
{
  switch (code_) {
    case ErrorCode::parse:
    case ErrorCode::validation:
    case ErrorCode::size:
    case ErrorCode::dependence_order:
    case ErrorCode::configuration:
    case ErrorCode::domain:
      return true;
    default:
      return false;
  }
}

} // namespace hetassoc
