#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fcodt {

/// Seedable generator whose output is identical on every platform.
///
/// The engine is std::mt19937_64 (bit-exact by the standard); the library's
/// distribution objects are implementation-defined, so uniforms, normals and
/// bounded integers are derived here from raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();
  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::below.
void shuffle(std::span<std::size_t> items, Rng& rng);
std::vector<std::size_t> iota_indices(std::size_t n);

/// Order-sensitive 64-bit mixing of a seed with a sequence of keys.
std::uint64_t mix_seed(std::uint64_t base, std::string_view key);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t key);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace fcodt
