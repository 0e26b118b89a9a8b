#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace stagenet {

// Deterministic RNG: all samplers are implemented here (not delegated to
// std::*_distribution) so the same seed gives the same stream on any
// platform/toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream, e.g. one per benchmark replicate.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

  double uniform();                       // U(0,1), open at both ends
  double uniform(double lo, double hi);
  double normal(double mean, double sd);
  double gamma(double shape, double scale);       // mean = shape*scale
  double inv_gamma(double shape, double scale);   // density ~ x^{-a-1} e^{-b/x}
  double chi_square(double dof);
  int uniform_int(int n);                 // uniform on {0, ..., n-1}
  // Index draw proportional to nonnegative weights; throws when all zero.
  int categorical(std::span<const double> weights);
  // As above but weights given as logs (log-sum-exp normalized).
  int categorical_log(std::span<const double> log_weights);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stagenet
