#include "bullbear/combinatorics.hpp"

#include <mutex>
#include <numeric>
#include <string>

namespace bullbear {

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt result;
  mpz_bin_uiui(result.get_mpz_t(), n, k);
  return result;
}

BigInt falling_factorial(std::uint64_t x, std::uint64_t k) {
  if (k > x) return 0;
  BigInt result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result *= static_cast<unsigned long>(x - i);
  }
  return result;
}

BigInt factorial(std::uint64_t n) {
  BigInt result;
  mpz_fac_ui(result.get_mpz_t(), n);
  return result;
}

BigInt multinomial(std::span<const unsigned> parts) {
  BigInt result = 1;
  std::uint64_t running = 0;
  // product of C(running + part, part) telescopes to the multinomial
  for (const unsigned part : parts) {
    running += part;
    result *= binomial(running, part);
  }
  return result;
}

Stirling2Table::Stirling2Table(unsigned max_n) : max_n_(max_n), rows_(max_n + 1) {
  rows_[0] = {BigInt(1)};
  for (unsigned n = 1; n <= max_n; ++n) {
    auto& row = rows_[n];
    const auto& prev = rows_[n - 1];
    row.assign(n + 1, BigInt(0));
    for (unsigned k = 1; k <= n; ++k) {
      BigInt value = k < n ? BigInt(prev[k] * k) : BigInt(0);
      value += prev[k - 1];
      row[k] = value;
    }
  }
}

const BigInt& Stirling2Table::operator()(unsigned n, unsigned k) const {
  static const BigInt zero = 0;
  if (n > max_n_) {
    throw Error(Errc::invalid_argument,
                "Stirling table built to order " + std::to_string(max_n_) + ", asked for " + std::to_string(n));
  }
  if (k > n) return zero;
  return rows_[n][k];
}

std::shared_ptr<const Stirling2Table> stirling2_table(unsigned max_n) {
  static std::mutex mutex;
  static std::shared_ptr<const Stirling2Table> cached = std::make_shared<const Stirling2Table>(16);
  std::lock_guard lock(mutex);
  if (cached->max_n() < max_n) {
    cached = std::make_shared<const Stirling2Table>(std::max(max_n, 2 * cached->max_n()));
  }
  return cached;
}

BigInt stirling2(unsigned n, unsigned k) { return (*stirling2_table(n))(n, k); }

}  // namespace bullbear
