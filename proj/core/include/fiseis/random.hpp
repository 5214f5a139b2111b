#pragma once

#include <cstdint>
#include <limits>

namespace fiseis {

/**
 * Counter-based random source. The i-th output of stream s under seed k is
 * mix64(key(k, s) + (i + 1) * golden), where mix64 is the SplitMix64
 * finalizer, so any (seed, stream, counter) triple is reproducible on every
 * platform without carrying hidden state.
 *
 * Stream layout used by the simulator: stream 0 drives event times,
 * stream 1 drives magnitudes. Replicate r of a study runs under
 * derive_seed(seed, r).
 *
 * All variate transforms are implemented here rather than through
 * <random> distributions, whose algorithms differ between standard libraries.
 */
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kTimeStream = 0;
  static constexpr std::uint64_t kMagnitudeStream = 1;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform on (0, 1).
  double uniform_open() noexcept;
  double exponential() noexcept;
  double normal() noexcept;
  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape) noexcept;
  double beta(double p, double q) noexcept;
  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  static std::uint64_t mix64(std::uint64_t x) noexcept;
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fiseis
