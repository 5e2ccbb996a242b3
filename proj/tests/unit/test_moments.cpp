#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "bullbear/error.hpp"
#include "bullbear/moments.hpp"
#include "bullbear/oracle.hpp"
#include "support/brute_force.hpp"

using namespace bullbear;

namespace {

ExactRational frac(long p, long q) { return {BigInt(p), BigInt(q)}; }

const double kLog2 = std::log(2.0);

// Explicit alternating sum in long double, fine when the terms do not cancel badly.
long double finite_difference_reference(std::uint64_t k, std::uint64_t total, long double t) {
  long double sum = 0;
  long double c = 1;
  for (std::uint64_t j = 0; j <= k; ++j) {
    const long double base = 1.0L - static_cast<long double>(j) / static_cast<long double>(total);
    sum += (j % 2 == 0 ? c : -c) * std::pow(base, t);
    c = c * static_cast<long double>(k - j) / static_cast<long double>(j + 1);
  }
  return sum;
}

}  // namespace

TEST_CASE("finite difference term") {
  CHECK(finite_difference_term(0, 5, 3.7) == 1.0);
  CHECK(finite_difference_term_exact(0, 5, 3) == ExactRational(1));
  for (std::uint64_t k = 1; k <= 4; ++k) {
    CHECK(finite_difference_term(k, 5, 0.0) == 0.0);
    CHECK(finite_difference_term_exact(k, 5, 0).is_zero());
  }
  CHECK(finite_difference_term_exact(1, 3, 2) == frac(5, 9));
  CHECK(finite_difference_term(1, 3, 2.0) == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

  try {
    (void)finite_difference_term(4, 3, 1.0);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain_error);
  }
  CHECK_THROWS_AS(finite_difference_term_exact(4, 3, 2), Error);
  CHECK_THROWS_AS(finite_difference_term(1, 3, -1.0), Error);

  SUBCASE("floating matches exact for integer t across both evaluation regimes") {
    for (std::uint64_t total : {1ULL, 2ULL, 3ULL, 7ULL, 20ULL, 1000ULL, 1000000ULL}) {
      for (std::uint64_t k = 0; k <= std::min<std::uint64_t>(total, 9); ++k) {
        for (std::uint64_t t : {0ULL, 1ULL, 2ULL, 5ULL, 10ULL, 37ULL, 400ULL}) {
          const double exact = finite_difference_term_exact(k, total, t).to_double();
          const double floating = finite_difference_term(k, total, static_cast<double>(t));
          CHECK(std::abs(floating - exact) <= 1e-11 * std::abs(exact) + 1e-300);
        }
      }
    }
  }

  SUBCASE("real horizon against a long double reference") {
    for (std::uint64_t total : {10ULL, 50ULL, 400ULL}) {
      for (std::uint64_t k = 1; k <= 3; ++k) {
        for (double t : {0.5, 2.5, 7.25, 31.3, 333.3}) {
          const long double ref = finite_difference_reference(k, total, t);
          const double value = finite_difference_term(k, total, t);
          CHECK(std::abs(value - static_cast<double>(ref)) <= 1e-11 * std::abs(static_cast<double>(ref)) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("worked two-group instance") {
  // N = 3, one bull (u = 2), one bear (d = 1/2), t = 2; hand enumeration of
  // the nine paths gives E[c_d^2] = E[c_u^2] = 5/9 and 2 E[c_d c_u] = 4/9.
  const auto poly = moment_two_group_exact(1, 1, 3, 2, 2);
  CHECK(poly.coefficient(poly.index_of({2, 0})) == frac(5, 9));
  CHECK(poly.coefficient(poly.index_of({1, 1})) == frac(4, 9));
  CHECK(poly.coefficient(poly.index_of({0, 2})) == frac(5, 9));

  CHECK(moment_two_group(1, 1, 3, 2.0, 0.5, 2.0, 1) == doctest::Approx(0.0));
  CHECK(std::abs(moment_two_group(1, 1, 3, 2.0, 0.5, 2.0, 1)) < 1e-16);
  CHECK(moment_two_group(1, 1, 3, 2.0, 0.5, 2.0, 2) == doctest::Approx(2.0 / 3.0 * kLog2 * kLog2).epsilon(1e-14));
  CHECK(moment_two_group(1, 1, 3, 2.0, 0.5, 2.0, 2) == doctest::Approx(0.320302).epsilon(1e-6));

  const ModelParams params({{0.5, 1}, {2.0, 1}}, 3);
  CHECK(moment_multigroup_exact(params, 2, 2) == poly);
  CHECK(poly == testing::path_sum_polynomial(params, 2, 2));
}

TEST_CASE("first moment closed form") {
  for (std::uint64_t total = 1; total <= 6; ++total) {
    for (std::uint64_t bulls = 0; bulls <= total; ++bulls) {
      for (std::uint64_t bears = 0; bulls + bears <= total; ++bears) {
        for (std::uint64_t t = 0; t <= 8; ++t) {
          const double u = 1.3;
          const double d = 0.6;
          const double expected =
              (static_cast<double>(bulls) * std::log(u) + static_cast<double>(bears) * std::log(d)) *
              (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(total), static_cast<double>(t)));
          CHECK(moment_two_group(bulls, bears, total, u, d, static_cast<double>(t), 1) ==
                doctest::Approx(expected).epsilon(1e-13));
          // symbolic: coefficients are N_h(0) (1 - (1 - 1/N)^t)
          const auto poly = moment_two_group_exact(bulls, bears, total, t, 1);
          const ExactRational decay = finite_difference_term_exact(1, total, t);
          CHECK(poly.coefficient(0) == ExactRational(BigInt(static_cast<unsigned long>(bears))) * decay);
          CHECK(poly.coefficient(1) == ExactRational(BigInt(static_cast<unsigned long>(bulls))) * decay);
        }
      }
    }
  }

  // g = 1
  const ModelParams single({{1.4, 3}}, 7);
  for (double t : {0.0, 1.0, 4.5, 30.0}) {
    const double expected = 3 * std::log(1.4) * (1 - std::pow(1 - 1.0 / 7, t));
    CHECK(moment_multigroup(single, t, 1) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("two-group formula equals the g-group formula") {
  for (std::uint64_t total = 1; total <= 5; ++total) {
    for (std::uint64_t bulls = 0; bulls <= total; ++bulls) {
      for (std::uint64_t bears = 0; bulls + bears <= total; ++bears) {
        const ModelParams params({{0.8, bears}, {1.25, bulls}}, total);
        for (std::uint64_t t : {0ULL, 1ULL, 3ULL, 9ULL}) {
          for (unsigned n = 1; n <= 5; ++n) {
            CHECK(moment_two_group_exact(bulls, bears, total, t, n) == moment_multigroup_exact(params, t, n));
            const double a = moment_two_group(bulls, bears, total, 1.25, 0.8, static_cast<double>(t) + 0.5, n);
            const double b = moment_multigroup(params, static_cast<double>(t) + 0.5, n);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("three groups against path enumeration") {
  const ModelParams params({{0.5, 1}, {0.75, 1}, {2.0, 1}}, 4);
  const auto poly = moment_multigroup_exact(params, 5, 3);
  CHECK(poly == testing::path_sum_polynomial(params, 5, 3));
  const double value = poly.evaluate(params.log_factors());
  CHECK(moment_multigroup(params, 5.0, 3) == doctest::Approx(value).epsilon(1e-12));
}

TEST_CASE("floating and rational backends agree") {
  const std::vector<double> factor_pool{0.5, 0.75, 4.0 / 3.0, 2.0};
  for (std::uint64_t total = 1; total <= 4; ++total) {
    for (std::uint64_t a = 0; a <= total; ++a) {
      for (std::uint64_t b = 0; a + b <= total; ++b) {
        for (std::uint64_t c = 0; a + b + c <= total; ++c) {
          const ModelParams params({{0.5, a}, {0.75, b}, {2.0, c}}, total);
          for (std::uint64_t t = 0; t <= 8; ++t) {
            for (unsigned n = 1; n <= 5; ++n) {
              const double exact = moment_multigroup_exact(params, t, n).evaluate(params.log_factors());
              const double floating = moment_multigroup(params, static_cast<double>(t), n);
              CHECK(std::abs(exact - floating) <= 1e-10 * std::abs(exact) + 1e-13);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("cancellation stress at N = 1e6") {
  const std::uint64_t total = 1'000'000;
  const double exact = moment_two_group_exact(400'000, 350'000, total, 10, 8).evaluate(
      std::vector<double>{std::log(0.95), std::log(1.05)});
  const double floating = moment_two_group(400'000, 350'000, total, 1.05, 0.95, 10.0, 8);
  CHECK(std::abs(floating - exact) <= 1e-8 * std::abs(exact));
}

TEST_CASE("trace emits every term") {
  const ModelParams params({{0.5, 2}, {2.0, 1}}, 4);
  std::vector<TermTrace> records;
  const TraceSink sink = [&](const TermTrace& t) { records.push_back(t); };
  const auto coeffs = moment_coefficients(params.initial_counts(), 4, 3.0, 3, sink);
  REQUIRE(!records.empty());
  std::vector<double> rebuilt(coeffs.size(), 0.0);
  const auto order = compositions(3, 2);
  for (const auto& r : records) {
    const auto idx = static_cast<std::size_t>(std::find(order.begin(), order.end(), r.exponents) - order.begin());
    rebuilt[idx] += r.contribution;
    double j_sum = 0.0;
    for (const double term : r.j_terms) j_sum += term;
    CHECK(j_sum == doctest::Approx(r.finite_difference).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) CHECK(rebuilt[i] == doctest::Approx(coeffs[i]).epsilon(1e-13));
}

TEST_CASE("limit and binomial moments") {
  const LimitParams mean{{0.2, 0.5}, {0.9, 1.1}, 12, 1};
  CHECK(moment_limit(mean) == doctest::Approx(12 * (0.2 * std::log(0.9) + 0.5 * std::log(1.1))).epsilon(1e-14));
  CHECK(moment_limit(LimitParams{{0.2, 0.5}, {0.9, 1.1}, 0, 3}) == 0.0);
  CHECK(moment_limit(LimitParams{{0.5, 0.5}, {0.5, 2.0}, 1, 2}) == doctest::Approx(kLog2 * kLog2).epsilon(1e-14));

  CHECK(std::abs(moment_binomial(0.5, 2.0, 0.5, 1, 1)) < 1e-16);
  CHECK(moment_binomial(0.5, 2.0, 0.5, 1, 2) == doctest::Approx(0.480453).epsilon(1e-6));
  CHECK(testing::close_relative(moment_binomial(0.3, 1.1, 0.9, 20, 4), oracle::binomial_direct(0.3, 1.1, 0.9, 20, 4),
                                1e-12));

  CHECK_THROWS_AS(moment_limit(LimitParams{{0.7, 0.5}, {0.9, 1.1}, 3, 1}), Error);
  CHECK_THROWS_AS(moment_limit(LimitParams{{0.2, 0.5}, {1.1, 0.9}, 3, 1}), Error);
  CHECK_THROWS_AS(moment_binomial(1.2, 1.1, 0.9, 3, 1), Error);

  SUBCASE("exact limit coefficients") {
    const std::vector<ExactRational> q{frac(1, 2), frac(1, 2)};
    const auto c = limit_coefficients<ExactRational>(q, 1, 2);
    // one step: E[(X log d + (1-X) log u)^2] with X ~ Bernoulli(1/2)
    CHECK(c == std::vector<ExactRational>{frac(1, 2), ExactRational(0), frac(1, 2)});
  }
}

TEST_CASE("finite N approaches the limit at rate 1/N") {
  const std::vector<double> q{0.3, 0.5};
  const std::vector<double> f{0.9, 1.1};
  for (unsigned n = 1; n <= 4; ++n) {
    const double limit = moment_limit(LimitParams{q, f, 20, n});
    auto error_at = [&](std::uint64_t total) {
      const ModelParams params({{f[0], static_cast<std::uint64_t>(std::llround(q[0] * total))},
                                {f[1], static_cast<std::uint64_t>(std::llround(q[1] * total))}},
                               total);
      return std::abs(moment_multigroup(params, 20.0, n) - limit);
    };
    CHECK(error_at(4000) <= 0.625 * error_at(2000));
  }
}

TEST_CASE("mean of an all-bull market rises with t and stays below N_1(0) log f") {
  const ModelParams params({{1.2, 5}}, 9);
  const double cap = 5 * std::log(1.2);
  double previous = -1.0;
  for (int t = 0; t <= 200; ++t) {
    const double m = moment_multigroup(params, t, 1);
    CHECK(m > previous);
    CHECK(m <= cap);
    previous = m;
  }
}

TEST_CASE("argument errors") {
  const ModelParams params({{0.5, 1}}, 2);
  CHECK_THROWS_AS(moment_multigroup(params, 1.0, 0), Error);
  CHECK_THROWS_AS(moment_multigroup(params, -1.0, 1), Error);
  CHECK_THROWS_AS(moment_two_group(1, 1, 3, 0.9, 0.5, 1.0, 1), Error);
  CHECK_THROWS_AS(moment_two_group(3, 1, 3, 2.0, 0.5, 1.0, 1), Error);
}
