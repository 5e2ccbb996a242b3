#include "bullbear/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "bullbear/error.hpp"

namespace bullbear::sim {
namespace {

constexpr std::uint64_t kBlockSize = 4096;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

struct BlockSums {
  std::vector<double> powers;          // sum X^n
  std::vector<double> squared_powers;  // sum X^{2n}
};

BlockSums run_block(const SimConfig& config, std::uint64_t first, std::uint64_t last) {
  BlockSums sums{std::vector<double>(config.max_order, 0.0), std::vector<double>(config.max_order, 0.0)};
  for (std::uint64_t path = first; path < last; ++path) {
    RandomStream stream(config.seed, path);
    const double x = sample_path(config.params, config.horizon, stream);
    double power = 1.0;
    for (unsigned n = 0; n < config.max_order; ++n) {
      power *= x;
      sums.powers[n] += power;
      sums.squared_powers[n] += power * power;
    }
  }
  return sums;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + stream_id * 0x9e3779b97f4a7c15ULL)) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double RandomStream::next_uniform() { return static_cast<double>(next_u64() >> 11U) * 0x1.0p-53; }

double sample_path(const ModelParams& params, std::uint64_t horizon, RandomStream& stream,
                   std::vector<std::uint64_t>* choices) {
  MarketState state = MarketState::initial(params);
  const auto& groups = params.groups();
  const std::uint64_t total = params.total_investors();
  for (std::uint64_t step = 0; step < horizon; ++step) {
    // One uniform investor index against cumulative remaining counts,
    // ordered group 1..g then Inactive.
    const double draw = stream.next_uniform() * static_cast<double>(total);
    const std::uint64_t pick = std::min(total - 1, static_cast<std::uint64_t>(draw));
    std::uint64_t cumulative = 0;
    Outcome outcome = Outcome::inactive();
    for (std::size_t h = 0; h < groups.size(); ++h) {
      cumulative += groups[h].initial_count - state.consumed[h];
      if (pick < cumulative) {
        outcome = Outcome::group(h);
        break;
      }
    }
    advance(params, state, outcome);
  }
  if (choices != nullptr) *choices = state.consumed;
  return state.log_price;
}

SampleMoments estimate_moments(const SimConfig& config, unsigned workers) {
  if (config.num_paths == 0) {
    throw Error(Errc::invalid_argument, "num_paths must be at least 1");
  }
  if (config.max_order == 0) {
    throw Error(Errc::invalid_argument, "max_order must be at least 1");
  }
  const std::uint64_t blocks = (config.num_paths + kBlockSize - 1) / kBlockSize;
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));

  std::vector<BlockSums> results(blocks);
  std::atomic<std::uint64_t> next_block{0};
  auto work = [&] {
    for (std::uint64_t b = next_block++; b < blocks; b = next_block++) {
      const std::uint64_t first = b * kBlockSize;
      results[b] = run_block(config, first, std::min(config.num_paths, first + kBlockSize));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<double> powers(config.max_order, 0.0);
  std::vector<double> squared(config.max_order, 0.0);
  for (const auto& block : results) {
    for (unsigned n = 0; n < config.max_order; ++n) {
      powers[n] += block.powers[n];
      squared[n] += block.squared_powers[n];
    }
  }
  const double count = static_cast<double>(config.num_paths);
  SampleMoments out;
  out.num_paths = config.num_paths;
  for (unsigned n = 0; n < config.max_order; ++n) {
    const double mean = powers[n] / count;
    const double variance = std::max(0.0, squared[n] / count - mean * mean);
    out.moments.push_back(mean);
    out.standard_errors.push_back(std::sqrt(variance / count));
  }
  return out;
}

}  // namespace bullbear::sim
