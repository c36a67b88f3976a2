#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace snnfra {

/// FNV-1a over raw bytes. Used for seed substreams and file digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator whose output is identical across standard libraries:
/// std::mt19937_64 is fully specified, and the distributions below are
/// implemented here rather than taken from <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream keyed by a stable name, e.g. derive(seed, "adasyn").
  static Rng derive(std::uint64_t seed, std::string_view name) { return Rng(substream(seed, name)); }
  static std::uint64_t substream(std::uint64_t seed, std::string_view name) {
    return splitmix64(seed ^ fnv1a64(name));
  }
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [0, n), n > 0, without modulo bias.
  std::size_t index(std::size_t n);

  double normal();

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace snnfra
