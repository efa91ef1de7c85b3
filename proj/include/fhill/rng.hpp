#ifndef FHILL_RNG_HPP
#define FHILL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "error.hpp"

namespace fhill {

/// A reproducible random stream keyed by (master_seed, stream_index).
///
/// Each stream owns a Mersenne Twister seeded through std::seed_seq from the
/// four 32-bit halves of the key, so equal keys give identical sequences and
/// distinct indices give unrelated ones. Both the engine and seed_seq are
/// fully specified by the standard, which makes sequences portable.
class RngStream {
public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_(master_seed), stream_index_(stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  /// Uniform variate strictly inside (0,1): a 53-bit grid shifted by half a step.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unit exponential by inverse transform.
  double exponential() { return -std::log(uniform()); }

private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive sub-seeds (e.g. one per table or per
/// study) from a master seed without overlapping stream keys.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// `count` iid Exp(1) variates drawn from `stream`.
inline std::vector<double> exp_stream(RngStream& stream, std::size_t count) {
  if (count == 0) throw ArgumentError("exp_stream: count must be >= 1");
  std::vector<double> out(count);
  for (auto& e : out) e = stream.exponential();
  return out;
}

}  // namespace fhill

#endif  // FHILL_RNG_HPP
