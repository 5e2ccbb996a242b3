#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bullbear/rational.hpp"

namespace bullbear {

/// One investor group: choosing a member multiplies the price by `factor`.
struct GroupSpec {
  double factor = 1.0;
  std::uint64_t initial_count = 0;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// g groups ordered by strictly increasing factor, plus the total investor
/// count N. Investors outside every group are inactive from the start.
class ModelParams {
 public:
  /// Throws invalid_params on non-positive or non-increasing factors,
  /// N == 0, or sum of counts > N.
  ModelParams(std::vector<GroupSpec> groups, std::uint64_t total_investors);

  const std::vector<GroupSpec>& groups() const { return groups_; }
  std::size_t group_count() const { return groups_.size(); }
  std::uint64_t total_investors() const { return total_; }
  std::uint64_t active_investors() const;

  std::vector<std::uint64_t> initial_counts() const;
  std::vector<double> factors() const;
  std::vector<double> log_factors() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::vector<GroupSpec> groups_;
  std::uint64_t total_;
};

/// A chosen investor: a member of group h, or an inactive investor.
class Outcome {
 public:
  static constexpr Outcome group(std::size_t index) { return Outcome(index); }
  static constexpr Outcome inactive() { return Outcome(kInactive); }

  constexpr bool is_inactive() const { return index_ == kInactive; }
  constexpr std::size_t group_index() const { return index_; }

  friend constexpr bool operator==(Outcome, Outcome) = default;

 private:
  static constexpr std::size_t kInactive = std::numeric_limits<std::size_t>::max();
  explicit constexpr Outcome(std::size_t index) : index_(index) {}

  std::size_t index_;
};

struct MarketState {
  /// Members of each group chosen so far.
  std::vector<std::uint64_t> consumed;
  /// log p(t) - log p(0)
  double log_price = 0.0;
  std::uint64_t time = 0;

  static MarketState initial(const ModelParams& params);

  friend bool operator==(const MarketState&, const MarketState&) = default;
};

/// Throws invalid_state unless consumed_h <= N_h(0) and time >= sum consumed.
void validate_state(const ModelParams& params, const MarketState& state);

/// Members of each group still available.
std::vector<std::uint64_t> remaining_counts(const ModelParams& params, const MarketState& state);

/// One probability per group followed by the Inactive probability; sums to 1.
std::vector<ExactRational> transition_probs(const ModelParams& params, const MarketState& state);

/// In-place transition. Throws depleted_group if the group has no members left.
void advance(const ModelParams& params, MarketState& state, Outcome outcome);

MarketState step(const ModelParams& params, const MarketState& state, Outcome outcome);

/// Product of transition probabilities along the path; zero once a path
/// picks a depleted group.
ExactRational path_probability(const ModelParams& params, std::span<const Outcome> path);

}  // namespace bullbear
