#include "bullbear/error.hpp"

namespace bullbear {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::invalid_state: return "InvalidState";
    case Errc::depleted_group: return "DepletedGroup";
    case Errc::distinctness_violated: return "DistinctnessViolated";
    case Errc::domain_error: return "DomainError";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::singular_hankel: return "SingularHankel";
    case Errc::complex_roots: return "ComplexRoots";
    case Errc::zero_root: return "ZeroRoot";
    case Errc::invalid_fit: return "InvalidFit";
    case Errc::anchor_too_small: return "AnchorTooSmall";
    case Errc::total_too_small: return "TotalTooSmall";
    case Errc::non_positive_price: return "NonPositivePrice";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace bullbear
