#include "bullbear/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bullbear/combinatorics.hpp"
#include "bullbear/error.hpp"

namespace bullbear {
namespace {

// Past this value of t*k/N the values (1 - j/N)^t are well separated and
// plain differencing is accurate; below it the binomial expansion in k/N is.
constexpr double kSeriesReach = 8.0;
constexpr double kSeriesMaxStep = 0.5;
constexpr int kSeriesMaxTerms = 20000;

void check_finite_difference_args(std::uint64_t k, std::uint64_t total) {
  if (total == 0) {
    throw Error(Errc::domain_error, "total investor count must be positive");
  }
  if (k > total) {
    throw Error(Errc::domain_error,
                "finite difference order " + std::to_string(k) + " exceeds N = " + std::to_string(total));
  }
}

bool is_integral(double t) { return std::floor(t) == t; }

double survival_power(std::uint64_t j, std::uint64_t total, double t) {
  if (j == total) return t == 0.0 ? 1.0 : 0.0;
  return std::exp(t * std::log1p(-static_cast<double>(j) / static_cast<double>(total)));
}

double finite_difference_by_differencing(std::uint64_t k, std::uint64_t total, double t) {
  std::vector<double> level(k + 1);
  for (std::uint64_t j = 0; j <= k; ++j) level[j] = survival_power(j, total, t);
  for (std::uint64_t pass = 0; pass < k; ++pass) {
    for (std::uint64_t j = 0; j + pass < k; ++j) level[j] -= level[j + 1];
  }
  return level[0];
}

// D_k = k! sum_{i>=k} C(t,i) (-1)^{i+k} (k/N)^i S(i,k)/k^i, from expanding
// (1 - j/N)^t in powers of j and sum_j (-1)^j C(k,j) j^i = (-1)^k k! S(i,k).
double finite_difference_by_series(std::uint64_t k, std::uint64_t total, double t) {
  const double step = static_cast<double>(k) / static_cast<double>(total);
  const double kd = static_cast<double>(k);
  // scaled[m] = S(i, m) / k^i for the current i
  std::vector<double> scaled(k + 1, 0.0);
  scaled[0] = 1.0;
  double binomial_power = 1.0;  // C(t, i) (k/N)^i
  double sum = 0.0;
  int quiet = 0;
  for (int i = 1; i < kSeriesMaxTerms; ++i) {
    for (std::uint64_t m = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(i)); m >= 1; --m) {
      scaled[m] = (static_cast<double>(m) * scaled[m] + scaled[m - 1]) / kd;
    }
    scaled[0] = 0.0;
    binomial_power *= (t - static_cast<double>(i - 1)) / static_cast<double>(i) * step;
    if (binomial_power == 0.0) break;  // integer t: the expansion terminates
    if (static_cast<std::uint64_t>(i) < k) continue;
    const double sign = ((static_cast<std::uint64_t>(i) + k) % 2 == 0) ? 1.0 : -1.0;
    const double term = sign * binomial_power * scaled[k];
    sum += term;
    if (static_cast<double>(i) > t && std::abs(term) <= 1e-18 * std::abs(sum)) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  double k_factorial = 1.0;
  for (std::uint64_t m = 2; m <= k; ++m) k_factorial *= static_cast<double>(m);
  return k_factorial * sum;
}

std::vector<double> signed_j_terms(std::uint64_t k, std::uint64_t total, double t) {
  std::vector<double> out(k + 1);
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    out[j] = sign * to_double(binomial(k, j)) * survival_power(j, total, t);
  }
  return out;
}

std::vector<double> signed_j_terms_exact(std::uint64_t k, std::uint64_t total, std::uint64_t t) {
  std::vector<double> out(k + 1);
  BigInt denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), total, t);
  for (std::uint64_t j = 0; j <= k; ++j) {
    BigInt power;
    mpz_ui_pow_ui(power.get_mpz_t(), total - j, t);
    BigInt numerator = binomial(k, j) * power;
    if (j % 2 == 1) numerator = -numerator;
    out[j] = ExactRational(numerator, denominator).to_double();
  }
  return out;
}

// Sum over k-vectors of prod_h N_h(0)^{(k_h)} S(n_h, k_h) * D_K, for every
// composition; `difference(K)` supplies D_K.
template <class S, class Difference, class JTerms>
std::vector<S> coefficients(std::span<const std::uint64_t> counts, std::uint64_t total, unsigned n,
                            Difference&& difference, JTerms&& j_terms, const TraceSink& trace) {
  using traits = scalar_traits<S>;
  if (n == 0) {
    throw Error(Errc::invalid_argument, "moment order must be at least 1");
  }
  const auto groups = static_cast<unsigned>(counts.size());
  const auto table = stirling2_table(n);

  std::uint64_t active = 0;
  for (const auto c : counts) active += c;
  if (active > total) {
    throw Error(Errc::invalid_params, "group counts exceed the total investor count");
  }
  const std::uint64_t max_k = std::min<std::uint64_t>(n, active);
  std::vector<S> differences;
  differences.reserve(max_k + 1);
  for (std::uint64_t k = 0; k <= max_k; ++k) differences.push_back(difference(k));

  const auto exponent_list = compositions(n, groups);
  std::vector<S> out;
  out.reserve(exponent_list.size());
  std::vector<unsigned> ks(groups);
  for (const auto& exponents : exponent_list) {
    const BigInt multi = multinomial(exponents);
    S inner(0);
    // odometer over k_h in [min(1, n_h), min(n_h, N_h(0))]
    bool empty = false;
    for (unsigned h = 0; h < groups; ++h) {
      ks[h] = exponents[h] == 0 ? 0U : 1U;
      if (ks[h] > counts[h]) empty = true;
    }
    while (!empty) {
      BigInt weight = 1;
      std::uint64_t big_k = 0;
      for (unsigned h = 0; h < groups; ++h) {
        weight *= falling_factorial(counts[h], ks[h]);
        weight *= table->operator()(exponents[h], ks[h]);
        big_k += ks[h];
      }
      const S& diff = differences[big_k];
      const S term = traits::from_integer(weight) * diff;
      inner = inner + term;
      if (trace) {
        TermTrace record;
        record.exponents = exponents;
        record.stirling_orders = ks;
        record.group_weight = to_double(weight);
        record.finite_difference = traits::to_real(diff);
        record.j_terms = j_terms(big_k);
        record.contribution = traits::to_real(traits::from_integer(multi) * term);
        trace(record);
      }
      unsigned h = 0;
      for (; h < groups; ++h) {
        const unsigned upper = static_cast<unsigned>(std::min<std::uint64_t>(exponents[h], counts[h]));
        if (ks[h] < upper) {
          ++ks[h];
          break;
        }
        ks[h] = exponents[h] == 0 ? 0U : 1U;
      }
      if (h == groups) break;
    }
    out.push_back(traits::from_integer(multi) * inner);
  }
  return out;
}

double evaluate_monomials(const std::vector<Composition>& exponents, std::span<const double> coefficients,
                          std::span<const double> log_factors) {
  double total = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (coefficients[i] == 0.0) continue;
    double monomial = coefficients[i];
    for (std::size_t h = 0; h < log_factors.size(); ++h) {
      for (unsigned e = 0; e < exponents[i][h]; ++e) monomial *= log_factors[h];
    }
    total += monomial;
  }
  return total;
}

void check_horizon(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(Errc::domain_error, "horizon must be a finite nonnegative number");
  }
}

// The two-group formula with its own bull/bear loops; kept apart from the
// g-group path so the two can be checked against each other.
template <class S, class Difference>
std::vector<S> two_group_coefficients(std::uint64_t bulls, std::uint64_t bears, std::uint64_t total, unsigned n,
                                      Difference&& difference) {
  using traits = scalar_traits<S>;
  if (n == 0) {
    throw Error(Errc::invalid_argument, "moment order must be at least 1");
  }
  if (bulls > total || bears > total - bulls) {
    throw Error(Errc::invalid_params, "bull and bear counts exceed the total investor count");
  }
  const auto table = stirling2_table(n);
  std::vector<S> differences;
  for (std::uint64_t k = 0; k <= std::min<std::uint64_t>(n, bulls + bears); ++k) {
    differences.push_back(difference(k));
  }
  // index n_u: colex order over (n_d, n_u)
  std::vector<S> out;
  for (unsigned n_u = 0; n_u <= n; ++n_u) {
    const unsigned n_d = n - n_u;
    S sum(0);
    for (unsigned k_u = 0; k_u <= n_u; ++k_u) {
      const BigInt up = falling_factorial(bulls, k_u) * (*table)(n_u, k_u);
      if (up == 0) continue;
      for (unsigned k_d = 0; k_d <= n_d; ++k_d) {
        const BigInt down = falling_factorial(bears, k_d) * (*table)(n_d, k_d);
        if (down == 0) continue;
        sum = sum + traits::from_integer(up * down) * differences[k_u + k_d];
      }
    }
    out.push_back(traits::from_integer(binomial(n, n_u)) * sum);
  }
  return out;
}

}  // namespace

double finite_difference_term(std::uint64_t k, std::uint64_t total, double t) {
  check_finite_difference_args(k, total);
  check_horizon(t);
  if (k == 0) return 1.0;
  // k-th difference of a polynomial of degree t < k
  if (is_integral(t) && t < static_cast<double>(k)) return 0.0;
  const double step = static_cast<double>(k) / static_cast<double>(total);
  if (step <= kSeriesMaxStep && t * step <= kSeriesReach) {
    return finite_difference_by_series(k, total, t);
  }
  return finite_difference_by_differencing(k, total, t);
}

ExactRational finite_difference_term_exact(std::uint64_t k, std::uint64_t total, std::uint64_t t) {
  check_finite_difference_args(k, total);
  BigInt numerator = 0;
  for (std::uint64_t j = 0; j <= k; ++j) {
    BigInt power;
    mpz_ui_pow_ui(power.get_mpz_t(), total - j, t);
    if (j % 2 == 0) {
      numerator += binomial(k, j) * power;
    } else {
      numerator -= binomial(k, j) * power;
    }
  }
  BigInt denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), total, t);
  return {numerator, denominator};
}

std::vector<double> moment_coefficients(std::span<const std::uint64_t> counts, std::uint64_t total, double t,
                                        unsigned n, const TraceSink& trace) {
  check_horizon(t);
  return coefficients<double>(
      counts, total, n, [&](std::uint64_t k) { return finite_difference_term(k, total, t); },
      [&](std::uint64_t k) { return signed_j_terms(k, total, t); }, trace);
}

LogPolynomial moment_polynomial(std::span<const std::uint64_t> counts, std::uint64_t total, std::uint64_t t,
                                unsigned n, const TraceSink& trace) {
  auto values = coefficients<ExactRational>(
      counts, total, n, [&](std::uint64_t k) { return finite_difference_term_exact(k, total, t); },
      [&](std::uint64_t k) { return signed_j_terms_exact(k, total, t); }, trace);
  LogPolynomial poly(n, static_cast<unsigned>(counts.size()));
  for (std::size_t i = 0; i < values.size(); ++i) poly.coefficient(i) = std::move(values[i]);
  return poly;
}

double moment_multigroup(const ModelParams& params, double t, unsigned n, const TraceSink& trace) {
  const auto counts = params.initial_counts();
  const auto coeffs = moment_coefficients(counts, params.total_investors(), t, n, trace);
  const auto logs = params.log_factors();
  return evaluate_monomials(compositions(n, static_cast<unsigned>(counts.size())), coeffs, logs);
}

LogPolynomial moment_multigroup_exact(const ModelParams& params, std::uint64_t t, unsigned n,
                                      const TraceSink& trace) {
  const auto counts = params.initial_counts();
  return moment_polynomial(counts, params.total_investors(), t, n, trace);
}

double moment_two_group(std::uint64_t bulls, std::uint64_t bears, std::uint64_t total, double u, double d, double t,
                        unsigned n) {
  check_horizon(t);
  if (!(u > 1.0) || !(d > 0.0 && d < 1.0)) {
    throw Error(Errc::invalid_params, "two-group model needs u > 1 and 0 < d < 1");
  }
  const auto coeffs = two_group_coefficients<double>(
      bulls, bears, total, n, [&](std::uint64_t k) { return finite_difference_term(k, total, t); });
  const double logs[] = {std::log(d), std::log(u)};
  return evaluate_monomials(compositions(n, 2), coeffs, logs);
}

LogPolynomial moment_two_group_exact(std::uint64_t bulls, std::uint64_t bears, std::uint64_t total, std::uint64_t t,
                                     unsigned n) {
  auto values = two_group_coefficients<ExactRational>(
      bulls, bears, total, n, [&](std::uint64_t k) { return finite_difference_term_exact(k, total, t); });
  LogPolynomial poly(n, 2);
  for (std::size_t i = 0; i < values.size(); ++i) poly.coefficient(i) = std::move(values[i]);
  return poly;
}

double moment(const MomentRequest& request) {
  return moment_multigroup(request.params, request.horizon, request.order);
}

void validate(const LimitParams& limit) {
  if (limit.fractions.size() != limit.factors.size()) {
    throw Error(Errc::invalid_params, "fractions and factors differ in length");
  }
  if (limit.order == 0) {
    throw Error(Errc::invalid_argument, "moment order must be at least 1");
  }
  double sum = 0.0;
  for (std::size_t h = 0; h < limit.fractions.size(); ++h) {
    const double q = limit.fractions[h];
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw Error(Errc::invalid_params, "fractions must be finite and nonnegative");
    }
    sum += q;
    if (!(limit.factors[h] > 0.0) || !std::isfinite(limit.factors[h])) {
      throw Error(Errc::invalid_params, "factors must be positive and finite");
    }
    if (h > 0 && !(limit.factors[h - 1] < limit.factors[h])) {
      throw Error(Errc::invalid_params, "factors must be strictly increasing");
    }
  }
  if (sum > 1.0 + 1e-12) {
    throw Error(Errc::invalid_params, "fractions sum to more than 1");
  }
}

template <Scalar S>
std::vector<S> limit_coefficients(std::span<const S> fractions, std::uint64_t t, unsigned n) {
  using traits = scalar_traits<S>;
  if (n == 0) {
    throw Error(Errc::invalid_argument, "moment order must be at least 1");
  }
  const auto groups = static_cast<unsigned>(fractions.size());
  const auto table = stirling2_table(n);
  // per-group Touchard-like polynomials are not separable because of
  // t^{(sum k)}, so iterate k-vectors explicitly
  std::vector<S> out;
  std::vector<unsigned> ks(groups);
  for (const auto& exponents : compositions(n, groups)) {
    S inner(0);
    for (unsigned h = 0; h < groups; ++h) ks[h] = exponents[h] == 0 ? 0U : 1U;
    while (true) {
      S weight(1);
      std::uint64_t big_k = 0;
      for (unsigned h = 0; h < groups; ++h) {
        weight = weight * ipow(fractions[h], ks[h]) * traits::from_integer((*table)(exponents[h], ks[h]));
        big_k += ks[h];
      }
      inner = inner + weight * traits::from_integer(falling_factorial(t, big_k));
      unsigned h = 0;
      for (; h < groups; ++h) {
        if (ks[h] < exponents[h]) {
          ++ks[h];
          break;
        }
        ks[h] = exponents[h] == 0 ? 0U : 1U;
      }
      if (h == groups) break;
    }
    out.push_back(traits::from_integer(multinomial(exponents)) * inner);
  }
  return out;
}

template std::vector<double> limit_coefficients<double>(std::span<const double>, std::uint64_t, unsigned);
template std::vector<ExactRational> limit_coefficients<ExactRational>(std::span<const ExactRational>, std::uint64_t,
                                                                      unsigned);

double moment_limit(const LimitParams& limit) {
  validate(limit);
  const auto coeffs = limit_coefficients<double>(limit.fractions, limit.horizon, limit.order);
  std::vector<double> logs;
  for (const double f : limit.factors) logs.push_back(std::log(f));
  return evaluate_monomials(compositions(limit.order, static_cast<unsigned>(logs.size())), coeffs, logs);
}

double moment_binomial(double q_u, double u, double d, std::uint64_t t, unsigned n) {
  if (!(q_u >= 0.0 && q_u <= 1.0)) {
    throw Error(Errc::invalid_params, "q_u must lie in [0, 1]");
  }
  if (!(u > 1.0) || !(d > 0.0 && d < 1.0)) {
    throw Error(Errc::invalid_params, "binomial model needs u > 1 and 0 < d < 1");
  }
  return moment_limit(LimitParams{{1.0 - q_u, q_u}, {d, u}, t, n});
}

}  // namespace bullbear
