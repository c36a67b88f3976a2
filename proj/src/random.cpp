#include "snnfra/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "snnfra/error.hpp"

namespace snnfra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::DuplicatePair: return "DuplicatePair";
    case ErrorCode::EmptyConcept: return "EmptyConcept";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::EmptyNegativeClass: return "EmptyNegativeClass";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DependencyError: return "DependencyError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t Rng::index(std::size_t n) {
  require(n > 0, "Rng::index needs n > 0");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  // Box-Muller; u1 in (0, 1] keeps log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace snnfra
