#pragma once

#include <cstdint>
#include <random>

namespace anyon {

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// Output k of a stream is a SplitMix64 finalizer applied to key + k·γ, so a
/// stream can be created anywhere (any thread, any order) and reproduces the
/// same sequence. Satisfies UniformRandomBitGenerator. A single stream must not
/// be shared between concurrent consumers.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Standard normal deviate.
  double normal() { return normal_(*this); }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace anyon
