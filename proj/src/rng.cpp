#include "unmix/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace unmix {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInv2p53 = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

double RngState::uniform() {
  return static_cast<double>(engine_() >> 11) * kInv2p53;
}

double RngState::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return u;
}

double RngState::normal01() {
  // Box-Muller, cosine branch only.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngState::normal(double mean, double variance) {
  if (!(variance > 0.0)) throw std::domain_error("normal variance must be > 0");
  return mean + std::sqrt(variance) * normal01();
}

double RngState::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("gamma shape and scale must be > 0");
  if (shape < 1.0) {
    const double u = uniform_open();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal01();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double RngState::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("inverse-gamma shape and scale must be > 0");
  return scale / gamma(shape, 1.0);
}

std::vector<double> RngState::dirichlet(double beta, int dim) {
  if (!(beta > 0.0)) throw std::domain_error("dirichlet beta must be > 0");
  if (dim < 2) throw std::domain_error("dirichlet dimension must be >= 2");
  std::vector<double> out(static_cast<std::size_t>(dim));
  double sum = 0.0;
  for (double& v : out) {
    v = gamma(beta, 1.0);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace unmix
