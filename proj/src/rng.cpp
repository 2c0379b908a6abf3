#include "anyon/rng.hpp"

namespace anyon {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed),
      stream_id_(stream_id),
      key_(splitmix64(master_seed ^ splitmix64(stream_id + kGolden) ^ 0xD1B54A32D192ED03ULL)) {}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGolden);
}

}  // namespace anyon
