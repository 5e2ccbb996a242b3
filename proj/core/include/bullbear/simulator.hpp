#pragma once

#include <cstdint>
#include <vector>

#include "bullbear/model.hpp"

namespace bullbear::sim {

/// Counter-based stream: the i-th draw is a pure function of
/// (seed, stream id, i), so each path replays identically no matter which
/// worker runs it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Samples one path. `choices`, when given, receives the number of times
/// each group was chosen.
double sample_path(const ModelParams& params, std::uint64_t horizon, RandomStream& stream,
                   std::vector<std::uint64_t>* choices = nullptr);

struct SimConfig {
  ModelParams params;
  std::uint64_t horizon = 0;
  std::uint64_t num_paths = 1;
  unsigned max_order = 1;
  std::uint64_t seed = 0;
};

struct SampleMoments {
  std::vector<double> moments;          // order 1..max_order
  std::vector<double> standard_errors;  // sd(X^n) / sqrt(num_paths), plug-in
  std::uint64_t num_paths = 0;

  friend bool operator==(const SampleMoments&, const SampleMoments&) = default;
};

/// Paths are grouped into fixed-size blocks merged in block order, so the
/// result is bit-identical for any `workers` (0 = hardware concurrency).
SampleMoments estimate_moments(const SimConfig& config, unsigned workers = 0);

}  // namespace bullbear::sim
