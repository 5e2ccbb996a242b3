#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bullbear {

enum class Errc {
  invalid_argument,
  invalid_params,
  invalid_state,
  depleted_group,
  distinctness_violated,
  domain_error,
  budget_exceeded,
  singular_hankel,
  complex_roots,
  zero_root,
  invalid_fit,
  anchor_too_small,
  total_too_small,
  non_positive_price,
  insufficient_data,
  io_error,
  parse_error,
};

/// Stable identifier used in CLI error messages, e.g. "SingularHankel".
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bullbear
