#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace unmix {

// Seedable generator with hand-rolled distribution transforms so draw
// sequences are reproducible for a given seed within one build.
// Single-owner: not safe for concurrent mutation; each chain owns its own.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform();

  // Uniform on (0, 1); never returns 0, safe under log().
  double uniform_open();

  double normal(double mean, double variance);

  // Marsaglia-Tsang (2000) squeeze method; shape < 1 handled by the
  // usual shape+1 draw with a u^(1/shape) boost.
  double gamma(double shape, double scale);

  // Shape/scale parameterization: density ~ x^(-shape-1) exp(-scale/x).
  double inverse_gamma(double shape, double scale);

  // Symmetric Dirichlet(beta) point on the dim-simplex.
  std::vector<double> dirichlet(double beta, int dim);

 private:
  double normal01();

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace unmix
