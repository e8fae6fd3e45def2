#include "tou/rng.hpp"

#include "tou/gaussian.hpp"

namespace tou {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t state = a ^ (b * 0x9E3779B97F4A7C15ULL);
  splitmix64(state);
  return splitmix64(state);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngSeed RngSeed::substream(std::uint64_t index) const noexcept {
  return RngSeed{seed, mix(stream_id + 0x5851F42D4C957F2DULL, index + 1)};
}

Rng::Rng(RngSeed seed) noexcept {
  std::uint64_t state = seed.seed;
  const std::uint64_t salt = mix(seed.stream_id, 0xD1B54A32D192ED03ULL);
  state ^= salt;
  for (auto& word : s_) word = splitmix64(state);
  // The all-zero state is a fixed point of xoshiro.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Rng::result_type Rng::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() noexcept {
  // (m + 0.5) / 2^53 with m in [0, 2^53): never 0 or 1.
  const std::uint64_t m = next() >> 11;
  return (static_cast<double>(m) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept { return norm_quantile(uniform()); }

}  // namespace tou
