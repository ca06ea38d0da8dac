#include "fwgames/rng.hpp"

#include <cmath>
#include <numbers>

#include "fwgames/error.hpp"

namespace fwg {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  require(!weights.empty(), Errc::InvalidArgument, "categorical over empty support");
  double total = 0.0;
  for (double w : weights) total += w;
  require(total > 0.0 && std::isfinite(total), Errc::InvalidArgument,
          "categorical weights must have positive finite sum");
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (u < acc) return k;
  }
  return last_positive;
}

}  // namespace fwg
