#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bullbear/combinatorics.hpp"
#include "bullbear/log_polynomial.hpp"
#include "bullbear/model.hpp"
#include "bullbear/rational.hpp"
#include "bullbear/scalar.hpp"

// Brute-force ground truth. Nothing here uses the closed-form moment
// formulas; it sums over paths or over the binomial distribution directly.

namespace bullbear::oracle {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Budget from BULLBEAR_ENUM_BUDGET, else kDefaultEnumerationBudget.
std::uint64_t default_enumeration_budget();

/// Law of the per-group choice counts after t steps.
struct CountDistribution {
  std::vector<std::vector<std::uint64_t>> counts;  // one entry per reachable count vector
  std::vector<ExactRational> probabilities;
  ExactRational total_mass;
  std::uint64_t leaves = 0;  // nonzero-probability paths visited
};

/// Depth-first walk over all paths in {groups, Inactive}^t, pruning branches
/// through depleted groups. Throws budget_exceeded if (g+1)^t > budget.
CountDistribution enumerate_paths(const ModelParams& params, std::uint64_t t,
                                  std::uint64_t budget = default_enumeration_budget());

/// E[(sum_h c_h log f_h)^n] expanded exactly into monomials of the log factors.
LogPolynomial moment_polynomial(const CountDistribution& distribution, unsigned n, unsigned groups);

struct EnumeratedMoment {
  LogPolynomial polynomial;
  double value = 0.0;
  ExactRational total_mass;
};

EnumeratedMoment enumerate_moment(const ModelParams& params, std::uint64_t t, unsigned n,
                                  std::uint64_t budget = default_enumeration_budget());

/// sum_x C(t,x) q^x (1-q)^{t-x} (x log u + (t-x) log d)^n
double binomial_direct(double q_u, double u, double d, std::uint64_t t, unsigned n);

/// E[(sum_h r_h X_h)^n] for independent X_h ~ Poisson(lambda_h), through the
/// multinomial expansion and E[X^m] = sum_k S(m,k) lambda^k.
template <Scalar S>
S compound_poisson_moment(std::span<const S> weights, std::span<const S> rates, unsigned n) {
  using traits = scalar_traits<S>;
  if (weights.size() != rates.size() || weights.empty()) {
    throw Error(Errc::invalid_argument, "weights and rates must be nonempty and of equal length");
  }
  for (const auto& w : weights) {
    if (!(S(0) < w)) throw Error(Errc::invalid_argument, "Poisson weights must be positive");
  }
  const auto table = stirling2_table(n);
  const auto groups = static_cast<unsigned>(weights.size());
  // raw Poisson moments E[X_h^m], m = 0..n
  std::vector<std::vector<S>> raw(groups, std::vector<S>(n + 1, S(0)));
  for (unsigned h = 0; h < groups; ++h) {
    for (unsigned m = 0; m <= n; ++m) {
      S value(0);
      for (unsigned k = 0; k <= m; ++k) {
        value = value + traits::from_integer((*table)(m, k)) * ipow(weights[h], k);
      }
      raw[h][m] = value;
    }
  }
  S total(0);
  for (const auto& exponents : compositions(n, groups)) {
    S term = traits::from_integer(multinomial(exponents));
    for (unsigned h = 0; h < groups; ++h) {
      term = term * ipow(rates[h], exponents[h]) * raw[h][exponents[h]];
    }
    total = total + term;
  }
  return total;
}

}  // namespace bullbear::oracle
