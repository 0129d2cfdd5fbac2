#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace batchband {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over the bytes of a key string.
constexpr std::uint64_t hash_key(std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// seed_i = hash(master_seed, cell_key, i); does not depend on the repetition count.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view cell_key,
                                    std::uint64_t index) {
  return mix64(mix64(master_seed ^ mix64(hash_key(cell_key))) + mix64(index + 1));
}

// Random stream owned by a single trajectory.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Sub-stream `k` of `seed`; streams with different k do not overlap in practice.
  static Rng stream(std::uint64_t seed, std::uint64_t k) { return Rng(mix64(seed) ^ mix64(~k)); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace batchband
