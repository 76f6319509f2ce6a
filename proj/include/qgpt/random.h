#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qgpt {

// Derives an independent stream seed from a root seed, a component tag and
// an index. Stable across platforms (SplitMix64 over an FNV-1a tag hash).
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view tag,
                         std::uint64_t index = 0);

std::uint64_t Fnv1a64(std::string_view data);

// Portable random stream. std::mt19937_64 is fully specified by the
// standard, but the std distributions are not, so uniform and normal draws
// are computed here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t Index(std::uint64_t n);
  // Standard normal (Box-Muller, one cached value).
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qgpt
