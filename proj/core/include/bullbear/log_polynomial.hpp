#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bullbear/rational.hpp"

namespace bullbear {

using Composition = std::vector<unsigned>;

/// All weak compositions of `total` into `parts` nonnegative parts, in
/// colexicographic order (the last part varies slowest). parts == 0 yields
/// one empty composition when total == 0 and none otherwise.
std::vector<Composition> compositions(unsigned total, unsigned parts);

/// Homogeneous polynomial sum_e c_e prod_h L_h^{e_h} in the log factors
/// L_h = log f_h, with exact rational coefficients. Monomials are kept in
/// the colexicographic order of compositions(degree, groups).
class LogPolynomial {
 public:
  LogPolynomial(unsigned degree, unsigned groups);

  unsigned degree() const { return degree_; }
  unsigned groups() const { return groups_; }
  const std::vector<Composition>& exponents() const { return exponents_; }
  const std::vector<ExactRational>& coefficients() const { return coefficients_; }

  ExactRational& coefficient(std::size_t index) { return coefficients_.at(index); }
  const ExactRational& coefficient(std::size_t index) const { return coefficients_.at(index); }
  /// Index of a monomial, or throws invalid_argument.
  std::size_t index_of(const Composition& exponent) const;

  /// Single floating evaluation at the given log factors.
  double evaluate(std::span<const double> log_factors) const;

  friend bool operator==(const LogPolynomial&, const LogPolynomial&) = default;

 private:
  unsigned degree_;
  unsigned groups_;
  std::vector<Composition> exponents_;
  std::vector<ExactRational> coefficients_;
};

}  // namespace bullbear
