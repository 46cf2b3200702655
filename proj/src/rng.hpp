#pragma once

#include <cstdint>
#include <string_view>

namespace hw {

/// Stafford's "mix13" variant of the splitmix64 finalizer. Bijective on
/// 64-bit words with full avalanche; identical on every platform.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// FNV-1a over the tag bytes; used only to turn stream tags into salts.
std::uint64_t hash_tag(std::string_view tag);

/// Counter-based seed derivation: distinct (master, tag, index) triples
/// map to statistically independent 64-bit seeds. Order-free, so
/// parallel fills of a lattice window are reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index);

/// Packs a signed lattice coordinate pair into a derivation index.
std::uint64_t site_index(int x, int t);

/// Small splitmix64 stream generator. Cheap to construct per site.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0,1) with 53 random bits.
  double next_u01() { return (next_u64() >> 11) * 0x1.0p-53; }

  double next_normal();
  /// log of a Gamma(shape,1) variate; stays finite for tiny shapes where
  /// the variate itself would underflow.
  double next_log_gamma(double shape);
  double next_beta(double a, double b);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hw
