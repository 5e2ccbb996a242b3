#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bullbear/log_polynomial.hpp"
#include "bullbear/model.hpp"
#include "bullbear/rational.hpp"
#include "bullbear/scalar.hpp"

// Closed-form moments of the log return log(p(t)/p(0)).
//
// For group counts N_h(0), total N and horizon t, the n-th moment is
//
//   sum_{n_1+...+n_g=n} n!/prod n_h! prod_h (log f_h)^{n_h}
//     * sum_{k_1..k_g} prod_h N_h(0)^{(k_h)} S(n_h, k_h) * D_{k_1+...+k_g}(N, t)
//
// with D_k(N, t) = sum_{j=0}^{k} (-1)^j C(k, j) (1 - j/N)^t and x^{(k)} the
// falling factorial. Everything except the log factors is rational, so the
// exact backend returns the coefficients of the monomials prod (log f_h)^{n_h}.

namespace bullbear {

/// One (composition, k-vector) term of the moment sum.
struct TermTrace {
  Composition exponents;
  std::vector<unsigned> stirling_orders;
  double group_weight = 0.0;        // prod_h N_h(0)^{(k_h)} S(n_h, k_h)
  double finite_difference = 0.0;   // D_K with K = sum k_h
  std::vector<double> j_terms;      // (-1)^j C(K, j) (1 - j/N)^t
  double contribution = 0.0;        // multinomial * group_weight * D_K
};

using TraceSink = std::function<void(const TermTrace&)>;

/// D_k(N, t) for real t >= 0. Throws domain_error when k > N or t < 0.
double finite_difference_term(std::uint64_t k, std::uint64_t total, double t);
/// D_k(N, t), exact, for integer t.
ExactRational finite_difference_term_exact(std::uint64_t k, std::uint64_t total, std::uint64_t t);

/// Monomial coefficients (colex order of compositions(n, g)), floating backend.
std::vector<double> moment_coefficients(std::span<const std::uint64_t> counts, std::uint64_t total, double t,
                                        unsigned n, const TraceSink& trace = {});
/// Monomial coefficients, exact backend; requires integer t.
LogPolynomial moment_polynomial(std::span<const std::uint64_t> counts, std::uint64_t total, std::uint64_t t,
                                unsigned n, const TraceSink& trace = {});

double moment_multigroup(const ModelParams& params, double t, unsigned n, const TraceSink& trace = {});
LogPolynomial moment_multigroup_exact(const ModelParams& params, std::uint64_t t, unsigned n,
                                      const TraceSink& trace = {});

/// Two-group formula with bulls (factor u > 1) and bears (factor d in (0,1)).
double moment_two_group(std::uint64_t bulls, std::uint64_t bears, std::uint64_t total, double u, double d, double t,
                        unsigned n);
/// Exact two-group coefficients; monomials are over (log d, log u) in that order.
LogPolynomial moment_two_group_exact(std::uint64_t bulls, std::uint64_t bears, std::uint64_t total, std::uint64_t t,
                                     unsigned n);

struct MomentRequest {
  ModelParams params;
  double horizon = 0.0;
  unsigned order = 1;
};

double moment(const MomentRequest& request);

/// Infinitely many investors: group h holds a fraction q_h of them.
struct LimitParams {
  std::vector<double> fractions;
  std::vector<double> factors;
  std::uint64_t horizon = 0;
  unsigned order = 1;
};

void validate(const LimitParams& limit);

/// Coefficients of the N -> infinity moment,
/// n!/prod n_h! sum_k prod_h q_h^{k_h} S(n_h,k_h) * t^{(sum k_h)}.
template <Scalar S>
std::vector<S> limit_coefficients(std::span<const S> fractions, std::uint64_t t, unsigned n);

double moment_limit(const LimitParams& limit);

/// Classical binomial model: the limit with q_d = 1 - q_u.
double moment_binomial(double q_u, double u, double d, std::uint64_t t, unsigned n);

extern template std::vector<double> limit_coefficients<double>(std::span<const double>, std::uint64_t, unsigned);
extern template std::vector<ExactRational> limit_coefficients<ExactRational>(std::span<const ExactRational>,
                                                                             std::uint64_t, unsigned);

}  // namespace bullbear
