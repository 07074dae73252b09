#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace satprec {

// Derives a child seed from a root seed, a stream name and an optional index.
// Stable across platforms: FNV-1a over the name, then splitmix64 finalisation.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index = 0);

// Thin wrapper over mt19937_64 with the handful of draws the simulator needs.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Named sub-stream of a root seed. Toggling one consumer does not perturb
  // the draws of any other.
  static Rng stream(std::uint64_t root, std::string_view name,
                    std::uint64_t index = 0) {
    return Rng(derive_seed(root, name, index));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace satprec
