#ifndef PCFIT_RNG_HPP
#define PCFIT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pcfit {

/// Purpose tags for keyed random streams, so that the draws consumed by one
/// part of a replicate never shift another part.
enum class RngStream : std::uint64_t {
  design = 1,
  noise = 2,
  generic = 3,
};

/// Counter-based generator: draw i of a stream is a pure function of
/// (seed, n, replicate, stream, i), so replicates are order-independent and
/// safe to run on any worker. splitmix64 finalizer over a golden-ratio
/// counter walk; normals by Box-Muller.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t n, std::uint64_t replicate,
             RngStream stream)
      : key_(derive_key(seed, n, replicate, static_cast<std::uint64_t>(stream))) {}

  double uniform() {  // in (0, 1)
    std::uint64_t v = mix(key_ + (++counter_) * kGamma);
    double u = static_cast<double>(v >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t n,
                                  std::uint64_t replicate, std::uint64_t stream) {
    std::uint64_t k = mix(seed + kGamma);
    k = mix(k ^ (n + kGamma));
    k = mix(k ^ (replicate + kGamma));
    k = mix(k ^ (stream + kGamma));
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pcfit

#endif
