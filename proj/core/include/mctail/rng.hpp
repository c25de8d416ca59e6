#ifndef MCTAIL_RNG_HPP
#define MCTAIL_RNG_HPP

#include <cstdint>

namespace mctail {

// Identifies one logical random stream: a master seed plus a pair of
// non-negative stream indices (typically grid-cell index, replication index).
// Distinct stream ids under the same master seed yield independent,
// non-overlapping sequences; the same id always replays the same sequence,
// regardless of thread scheduling.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_a = 0;
  std::uint64_t stream_b = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// xoshiro256** seeded by hashing (master_seed, stream_a, stream_b) through
// splitmix64. Fully specified arithmetic, so sequences are identical across
// platforms and runs; value-like and freely copyable between threads.
class Xoshiro256 {
 public:
  explicit Xoshiro256(const RngStream& stream) noexcept {
    std::uint64_t h = stream.master_seed;
    h = detail::splitmix64(h) ^ stream.stream_a;
    h = detail::splitmix64(h) ^ stream.stream_b;
    for (auto& word : state_) word = detail::splitmix64(h);
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so
  // log() and tan() of derived quantities stay finite.
  double next_open01() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace mctail

#endif  // MCTAIL_RNG_HPP
