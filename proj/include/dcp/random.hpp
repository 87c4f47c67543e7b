#pragma once

#include <cmath>
#include <cstdint>

namespace dcp {

namespace detail {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. Draw number i of stream (seed, stream) is a
/// pure function of the triple, so results do not depend on platform,
/// thread count or the order in which streams are consumed.
class RandomStream {
 public:
  constexpr RandomStream(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream), key_(detail::mix64(detail::mix64(seed) ^ stream)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  std::uint64_t position() const noexcept { return counter_; }

  /// Independent child stream; the parent is not advanced.
  RandomStream split(std::uint64_t child) const noexcept {
    return RandomStream(seed_, detail::mix64(stream_ + 0x632be59bd9b4e019ULL) ^ detail::mix64(child));
  }

  std::uint64_t next_u64() noexcept {
    return detail::mix64(key_ ^ detail::mix64(counter_++));
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; bias is < n / 2^64 and irrelevant here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dcp
