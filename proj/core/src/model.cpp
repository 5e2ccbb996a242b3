#include "bullbear/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bullbear/error.hpp"

namespace bullbear {

ModelParams::ModelParams(std::vector<GroupSpec> groups, std::uint64_t total_investors)
    : groups_(std::move(groups)), total_(total_investors) {
  if (total_ == 0) {
    throw Error(Errc::invalid_params, "total_investors must be positive");
  }
  std::uint64_t sum = 0;
  for (std::size_t h = 0; h < groups_.size(); ++h) {
    const double f = groups_[h].factor;
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(Errc::invalid_params, "group " + std::to_string(h) + " factor must be positive and finite");
    }
    if (h > 0 && !(groups_[h - 1].factor < f)) {
      throw Error(Errc::invalid_params, "group factors must be strictly increasing");
    }
    if (groups_[h].initial_count > total_ - sum) {
      throw Error(Errc::invalid_params, "group counts exceed total_investors");
    }
    sum += groups_[h].initial_count;
  }
}

std::uint64_t ModelParams::active_investors() const {
  std::uint64_t sum = 0;
  for (const auto& g : groups_) sum += g.initial_count;
  return sum;
}

std::vector<std::uint64_t> ModelParams::initial_counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(g.initial_count);
  return out;
}

std::vector<double> ModelParams::factors() const {
  std::vector<double> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(g.factor);
  return out;
}

std::vector<double> ModelParams::log_factors() const {
  std::vector<double> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(std::log(g.factor));
  return out;
}

MarketState MarketState::initial(const ModelParams& params) {
  MarketState state;
  state.consumed.assign(params.group_count(), 0);
  return state;
}

void validate_state(const ModelParams& params, const MarketState& state) {
  if (state.consumed.size() != params.group_count()) {
    throw Error(Errc::invalid_state, "state has " + std::to_string(state.consumed.size()) + " groups, params have " +
                                         std::to_string(params.group_count()));
  }
  std::uint64_t used = 0;
  for (std::size_t h = 0; h < params.group_count(); ++h) {
    if (state.consumed[h] > params.groups()[h].initial_count) {
      throw Error(Errc::invalid_state, "group " + std::to_string(h) + " consumed beyond its initial count");
    }
    used += state.consumed[h];
  }
  if (state.time < used) {
    throw Error(Errc::invalid_state, "time is smaller than the number of consumed investors");
  }
}

std::vector<std::uint64_t> remaining_counts(const ModelParams& params, const MarketState& state) {
  validate_state(params, state);
  std::vector<std::uint64_t> out(params.group_count());
  for (std::size_t h = 0; h < out.size(); ++h) {
    out[h] = params.groups()[h].initial_count - state.consumed[h];
  }
  return out;
}

std::vector<ExactRational> transition_probs(const ModelParams& params, const MarketState& state) {
  const auto remaining = remaining_counts(params, state);
  const BigInt total(static_cast<unsigned long>(params.total_investors()));
  std::vector<ExactRational> probs;
  probs.reserve(remaining.size() + 1);
  std::uint64_t still_active = 0;
  for (const auto r : remaining) {
    probs.emplace_back(BigInt(static_cast<unsigned long>(r)), total);
    still_active += r;
  }
  probs.emplace_back(BigInt(static_cast<unsigned long>(params.total_investors() - still_active)), total);
  return probs;
}

void advance(const ModelParams& params, MarketState& state, Outcome outcome) {
  if (state.consumed.size() != params.group_count()) {
    throw Error(Errc::invalid_state, "state does not match the parameter group count");
  }
  if (!outcome.is_inactive()) {
    const std::size_t h = outcome.group_index();
    if (h >= params.group_count()) {
      throw Error(Errc::invalid_argument, "outcome names group " + std::to_string(h) + " which does not exist");
    }
    if (state.consumed[h] >= params.groups()[h].initial_count) {
      throw Error(Errc::depleted_group, "group " + std::to_string(h) + " has no members left");
    }
    ++state.consumed[h];
    state.log_price += std::log(params.groups()[h].factor);
  }
  ++state.time;
}

MarketState step(const ModelParams& params, const MarketState& state, Outcome outcome) {
  validate_state(params, state);
  MarketState next = state;
  advance(params, next, outcome);
  return next;
}

ExactRational path_probability(const ModelParams& params, std::span<const Outcome> path) {
  MarketState state = MarketState::initial(params);
  ExactRational probability(1);
  for (const Outcome outcome : path) {
    const auto probs = transition_probs(params, state);
    const std::size_t slot = outcome.is_inactive() ? params.group_count() : outcome.group_index();
    if (slot > params.group_count()) {
      throw Error(Errc::invalid_argument, "outcome names a group that does not exist");
    }
    if (probs[slot].is_zero()) return ExactRational(0);
    probability *= probs[slot];
    advance(params, state, outcome);
  }
  return probability;
}

}  // namespace bullbear
