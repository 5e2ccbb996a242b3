#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bullbear/error.hpp"
#include "bullbear/rational.hpp"
#include "bullbear/scalar.hpp"

namespace bullbear {

/// C(n, k); zero when k > n.
BigInt binomial(std::uint64_t n, std::uint64_t k);

/// x (x-1) ... (x-k+1). Zero whenever k > x; one for k == 0.
BigInt falling_factorial(std::uint64_t x, std::uint64_t k);

BigInt factorial(std::uint64_t n);

/// (sum parts)! / prod(parts!)
BigInt multinomial(std::span<const unsigned> parts);

/// Triangular table of Stirling numbers of the second kind, S(n, k) for
/// 0 <= k <= n <= max_n, built from S(n,k) = k S(n-1,k) + S(n-1,k-1).
class Stirling2Table {
 public:
  explicit Stirling2Table(unsigned max_n);

  unsigned max_n() const { return max_n_; }
  /// S(n, k); zero for k > n. Throws invalid_argument past max_n.
  const BigInt& operator()(unsigned n, unsigned k) const;

 private:
  unsigned max_n_;
  std::vector<std::vector<BigInt>> rows_;
};

/// Shared immutable table covering at least order max_n. Grows on demand;
/// previously returned tables stay valid.
std::shared_ptr<const Stirling2Table> stirling2_table(unsigned max_n);

/// S(n, k) from the shared table.
BigInt stirling2(unsigned n, unsigned k);

/// Sum over m_0+...+m_k = m of prod c_j^{m_j}, evaluated as
/// sum_j c_j^{m+k} / prod_{i != j} (c_j - c_i). Entries must be pairwise
/// distinct (exactly for rationals, relative gap > 1e-9 for doubles).
template <Scalar S>
S composition_power_sum(std::span<const S> c, unsigned m) {
  using traits = scalar_traits<S>;
  if (c.empty()) {
    throw Error(Errc::invalid_argument, "composition_power_sum needs at least one value");
  }
  const auto k = static_cast<unsigned>(c.size() - 1);
  S total(0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    S denominator(1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i == j) continue;
      if (!traits::distinct(c[j], c[i])) {
        throw Error(Errc::distinctness_violated, "composition_power_sum values must be pairwise distinct");
      }
      denominator = denominator * (c[j] - c[i]);
    }
    total = total + ipow(c[j], m + k) / denominator;
  }
  return total;
}

}  // namespace bullbear
