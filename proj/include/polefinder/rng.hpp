#pragma once

#include <cstdint>

#include "polefinder/normal.hpp"

namespace polefinder {

namespace detail {

//! splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

//! Fold an extra word into a stream key. Chain calls to derive sub-stream
//! keys from (seed, cell, replication, ...) tuples.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t word) noexcept
{
  return detail::mix64(key ^ detail::mix64(word + detail::kGolden));
}

//! Counter-based generator: deviate j of a stream is a pure function of
//! (key, j), so draws are reproducible under any evaluation order or
//! thread schedule.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key)
    : key_(key)
  {}

  //! Uniform deviate in the open interval (0, 1).
  double uniform(std::uint64_t index) const noexcept
  {
    const std::uint64_t w = detail::mix64(key_ + (index + 1) * detail::kGolden);
    return (static_cast<double>(w >> 11) + 0.5) * 0x1p-53;
  }

  //! Standard normal deviate via the inverse CDF (no rejection, so the
  //! stream layout is stable).
  double normal(std::uint64_t index) const
  {
    return normal_quantile(uniform(index));
  }

  std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
};

}  // namespace polefinder
