#include "bullbear/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "bullbear/error.hpp"

namespace bullbear::oracle {
namespace {

bool power_exceeds(std::uint64_t base, std::uint64_t exponent, std::uint64_t limit) {
  std::uint64_t value = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (value > limit / base) return true;
    value *= base;
  }
  return value > limit;
}

// Accumulates path weights (products of remaining counts; the common
// denominator N^t is applied at the end) per mixed-radix count index.
template <class Weight>
class PathWalker {
 public:
  PathWalker(const ModelParams& params, std::uint64_t horizon)
      : total_(params.total_investors()), horizon_(horizon), initial_(params.initial_counts()),
        remaining_(initial_), radix_(initial_.size()) {
    std::uint64_t stride = 1;
    for (std::size_t h = 0; h < initial_.size(); ++h) {
      radix_[h] = stride;
      stride *= initial_[h] + 1;
    }
    sums_.assign(stride, Weight(0));
    reached_.assign(stride, false);
  }

  void run() { visit(0, Weight(1), 0, total_ - active()); }

  const std::vector<Weight>& sums() const { return sums_; }
  const std::vector<bool>& reached() const { return reached_; }
  const std::vector<std::uint64_t>& radix() const { return radix_; }
  std::uint64_t leaves() const { return leaves_; }

 private:
  std::uint64_t active() const {
    std::uint64_t sum = 0;
    for (const auto r : remaining_) sum += r;
    return sum;
  }

  void visit(std::uint64_t depth, const Weight& weight, std::uint64_t index, std::uint64_t inactive) {
    if (depth == horizon_) {
      sums_[index] += weight;
      reached_[index] = true;
      ++leaves_;
      return;
    }
    for (std::size_t h = 0; h < remaining_.size(); ++h) {
      const std::uint64_t r = remaining_[h];
      if (r == 0) continue;
      --remaining_[h];
      visit(depth + 1, weight * Weight(r), index + radix_[h], inactive + 1);
      ++remaining_[h];
    }
    if (inactive != 0) visit(depth + 1, weight * Weight(inactive), index, inactive);
  }

  std::uint64_t total_;
  std::uint64_t horizon_;
  std::vector<std::uint64_t> initial_;
  std::vector<std::uint64_t> remaining_;
  std::vector<std::uint64_t> radix_;
  std::vector<Weight> sums_;
  std::vector<bool> reached_;
  std::uint64_t leaves_ = 0;
};

BigInt to_big(std::uint64_t value) { return BigInt(static_cast<unsigned long>(value)); }
BigInt to_big(const BigInt& value) { return value; }

template <class Weight>
CountDistribution collect(const ModelParams& params, std::uint64_t t) {
  PathWalker<Weight> walker(params, t);
  walker.run();
  BigInt denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), params.total_investors(), t);

  CountDistribution out;
  out.total_mass = ExactRational(0);
  out.leaves = walker.leaves();
  const auto& radix = walker.radix();
  const auto initial = params.initial_counts();
  for (std::size_t index = 0; index < walker.sums().size(); ++index) {
    if (!walker.reached()[index]) continue;
    std::vector<std::uint64_t> counts(initial.size());
    for (std::size_t h = 0; h < initial.size(); ++h) {
      counts[h] = (index / radix[h]) % (initial[h] + 1);
    }
    ExactRational p(to_big(walker.sums()[index]), denominator);
    out.total_mass += p;
    out.counts.push_back(std::move(counts));
    out.probabilities.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::uint64_t default_enumeration_budget() {
  if (const char* env = std::getenv("BULLBEAR_ENUM_BUDGET"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && value > 0) return value;
    throw Error(Errc::invalid_argument, std::string("BULLBEAR_ENUM_BUDGET is not a positive integer: ") + env);
  }
  return kDefaultEnumerationBudget;
}

CountDistribution enumerate_paths(const ModelParams& params, std::uint64_t t, std::uint64_t budget) {
  const std::uint64_t branching = params.group_count() + 1;
  if (branching > 1 && power_exceeds(branching, t, budget)) {
    throw Error(Errc::budget_exceeded, std::to_string(branching) + "^" + std::to_string(t) +
                                           " paths exceed the enumeration budget of " + std::to_string(budget));
  }
  // path weights are bounded by N^t; use machine words when that fits
  if (!power_exceeds(params.total_investors(), t, std::numeric_limits<std::uint64_t>::max() / 2)) {
    return collect<std::uint64_t>(params, t);
  }
  return collect<BigInt>(params, t);
}

LogPolynomial moment_polynomial(const CountDistribution& distribution, unsigned n, unsigned groups) {
  if (n == 0) {
    throw Error(Errc::invalid_argument, "moment order must be at least 1");
  }
  LogPolynomial poly(n, groups);
  for (std::size_t m = 0; m < poly.exponents().size(); ++m) {
    const auto& exponents = poly.exponents()[m];
    ExactRational sum(0);
    for (std::size_t i = 0; i < distribution.counts.size(); ++i) {
      BigInt product = 1;
      for (unsigned h = 0; h < groups; ++h) {
        BigInt power;
        mpz_ui_pow_ui(power.get_mpz_t(), distribution.counts[i][h], exponents[h]);
        product *= power;
      }
      if (product == 0) continue;
      sum += distribution.probabilities[i] * ExactRational(product);
    }
    poly.coefficient(m) = sum * ExactRational(multinomial(exponents));
  }
  return poly;
}

EnumeratedMoment enumerate_moment(const ModelParams& params, std::uint64_t t, unsigned n, std::uint64_t budget) {
  const auto distribution = enumerate_paths(params, t, budget);
  const auto groups = static_cast<unsigned>(params.group_count());
  auto poly = moment_polynomial(distribution, n, groups);
  const double value = poly.evaluate(params.log_factors());
  return {std::move(poly), value, distribution.total_mass};
}

double binomial_direct(double q_u, double u, double d, std::uint64_t t, unsigned n) {
  if (!(q_u >= 0.0 && q_u <= 1.0)) {
    throw Error(Errc::invalid_params, "q_u must lie in [0, 1]");
  }
  if (!(u > 0.0) || !(d > 0.0)) {
    throw Error(Errc::invalid_params, "factors must be positive");
  }
  const double log_u = std::log(u);
  const double log_d = std::log(d);
  double total = 0.0;
  for (std::uint64_t x = 0; x <= t; ++x) {
    const double weight = to_double(binomial(t, x)) * std::pow(q_u, static_cast<double>(x)) *
                          std::pow(1.0 - q_u, static_cast<double>(t - x));
    const double value = static_cast<double>(x) * log_u + static_cast<double>(t - x) * log_d;
    total += weight * std::pow(value, static_cast<double>(n));
  }
  return total;
}

}  // namespace bullbear::oracle
