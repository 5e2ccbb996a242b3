#include "bullbear/log_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bullbear/error.hpp"

namespace bullbear {

std::vector<Composition> compositions(unsigned total, unsigned parts) {
  std::vector<Composition> out;
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  Composition current(parts, 0);
  // Fill from the last part down so the last part is the outermost loop.
  std::function<void(unsigned, unsigned)> fill = [&](unsigned position, unsigned remaining) {
    if (position == 0) {
      current[0] = remaining;
      out.push_back(current);
      return;
    }
    for (unsigned value = 0; value <= remaining; ++value) {
      current[position] = value;
      fill(position - 1, remaining - value);
    }
  };
  fill(parts - 1, total);
  return out;
}

LogPolynomial::LogPolynomial(unsigned degree, unsigned groups)
    : degree_(degree), groups_(groups), exponents_(compositions(degree, groups)),
      coefficients_(exponents_.size()) {}

std::size_t LogPolynomial::index_of(const Composition& exponent) const {
  const auto it = std::find(exponents_.begin(), exponents_.end(), exponent);
  if (it == exponents_.end()) {
    throw Error(Errc::invalid_argument, "exponent vector is not a monomial of this polynomial");
  }
  return static_cast<std::size_t>(it - exponents_.begin());
}

double LogPolynomial::evaluate(std::span<const double> log_factors) const {
  if (log_factors.size() != groups_) {
    throw Error(Errc::invalid_argument, "log factor count does not match polynomial groups");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (coefficients_[i].is_zero()) continue;
    double monomial = coefficients_[i].to_double();
    for (unsigned h = 0; h < groups_; ++h) {
      for (unsigned e = 0; e < exponents_[i][h]; ++e) monomial *= log_factors[h];
    }
    total += monomial;
  }
  return total;
}

}  // namespace bullbear
