#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fwg {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of stream `stream` under master seed `seed`. Player i uses stream i,
/// the environment (noise, transitions, stopping) uses kNatureStream.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kNatureStream = 0xA5A5'0000'0000'0001ULL;

/// Thin wrapper over mt19937_64. Distributions are implemented here rather than
/// with <random> distributions so draws are identical across standard libraries.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  bool bernoulli(double p);
  double normal();
  /// Index drawn proportionally to `weights` (nonnegative, positive sum).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fwg
