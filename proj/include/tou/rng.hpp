#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tou {

/// Seed plus substream index. Equal (seed, stream_id) pairs produce
/// bit-identical draw sequences on every platform.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream for replication `index`; distinct indices give
  /// statistically independent generators.
  [[nodiscard]] RngSeed substream(std::uint64_t index) const noexcept;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** seeded through SplitMix64 over (seed, stream_id).
///
/// Normal variates use the inverse-CDF method (Wichura AS 241) applied to a
/// 53-bit uniform, so the normal stream depends only on integer arithmetic
/// and libm log/sqrt. Versioned as "xoshiro256ss-as241/1".
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr const char* kAlgorithm = "xoshiro256ss-as241/1";

  explicit Rng(RngSeed seed) noexcept;
  Rng(std::uint64_t seed, std::uint64_t stream_id) noexcept : Rng(RngSeed{seed, stream_id}) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace tou
