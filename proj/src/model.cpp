#include "unmix/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unmix/errors.hpp"

namespace unmix {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_dims(const EndmemberLibrary& lib, const AbundanceVector& a) {
  if (static_cast<int>(a.size()) != lib.endmembers()) {
    throw std::invalid_argument("abundance has " + std::to_string(a.size()) +
                                " components but library has " +
                                std::to_string(lib.endmembers()) + " endmembers");
  }
}

void check_bands(const EndmemberLibrary& lib, const PixelObservation& y) {
  if (y.bands() != lib.bands()) {
    throw std::invalid_argument("pixel has " + std::to_string(y.bands()) +
                                " bands but library has " + std::to_string(lib.bands()));
  }
}

}  // namespace

void EndmemberLibrary::validate() const {
  const int L = bands();
  const int R = endmembers();
  if (L < 2) throw ValidationError("library needs at least 2 bands, got " + std::to_string(L));
  if (R < 2)
    throw ValidationError("library needs at least 2 endmembers, got " + std::to_string(R));
  if (spectra.size() != static_cast<std::size_t>(L) * R)
    throw ValidationError("spectra size does not match bands x endmembers");
  for (int l = 1; l < L; ++l) {
    if (!(wavelengths[l] > wavelengths[l - 1]))
      throw ValidationError("wavelengths not strictly increasing at band " + std::to_string(l + 1));
  }
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const double v = spectra[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw ValidationError("reflectance out of [0,1] at flat index " + std::to_string(i));
  }
}

void PriorHyperparams::validate() const {
  if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
  if (!(nu > 0.0)) throw ValidationError("nu must be > 0");
}

void validate_abundance(const AbundanceVector& a) {
  if (a.size() < 2) throw ValidationError("abundance needs at least 2 components");
  double sum = 0.0;
  for (double v : a) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("abundance component negative or non-finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexSumTol)
    throw ValidationError("abundance sums to " + std::to_string(sum) + ", not 1");
}

std::vector<double> mix_linear(const EndmemberLibrary& lib, const AbundanceVector& a) {
  check_dims(lib, a);
  const int L = lib.bands();
  const int R = lib.endmembers();
  std::vector<double> out(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    double acc = 0.0;
    const double* row = &lib.spectra[static_cast<std::size_t>(l) * R];
    for (int r = 0; r < R; ++r) acc += row[r] * a[r];
    out[l] = acc;
  }
  return out;
}

std::vector<double> nonlinear_term(const EndmemberLibrary& lib, const AbundanceVector& a) {
  std::vector<double> h = mix_linear(lib, a);
  for (double& v : h) v *= v;
  return h;
}

std::vector<double> apply_post_nonlinearity(const std::vector<double>& mix, double b) {
  std::vector<double> out(mix.size());
  for (std::size_t l = 0; l < mix.size(); ++l) {
    const double h = mix[l] * mix[l];
    out[l] = mix[l] + b * h;  // bit-identical to Ma + b*nonlinear_term
  }
  return out;
}

std::vector<double> forward_ppnmm(const EndmemberLibrary& lib, const AbundanceVector& a,
                                  double b) {
  return apply_post_nonlinearity(mix_linear(lib, a), b);
}

double sum_squared_residual(const std::vector<double>& y, const std::vector<double>& model) {
  if (y.size() != model.size())
    throw std::invalid_argument("residual length mismatch: " + std::to_string(y.size()) +
                                " vs " + std::to_string(model.size()));
  double acc = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) {
    const double d = y[l] - model[l];
    acc += d * d;
  }
  return acc;
}

double log_likelihood(const PixelObservation& y, const EndmemberLibrary& lib,
                      const ModelParams& params) {
  check_bands(lib, y);
  if (!(params.sigma2 > 0.0)) throw std::domain_error("sigma2 must be > 0");
  const double L = static_cast<double>(y.bands());
  const double rss = sum_squared_residual(y.reflectance,
                                          forward_ppnmm(lib, params.abundance, params.b));
  return -0.5 * L * std::log(kTwoPi * params.sigma2) - rss / (2.0 * params.sigma2);
}

double log_dirichlet_prior(const AbundanceVector& a, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("beta must be > 0");
  const double R = static_cast<double>(a.size());
  double sum_log = 0.0;
  for (double v : a) {
    if (!(v > 0.0)) throw std::domain_error("abundance component not strictly positive");
    sum_log += std::log(v);
  }
  return std::lgamma(R * beta) - R * std::lgamma(beta) + (beta - 1.0) * sum_log;
}

double log_normal_density(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw std::domain_error("variance must be > 0");
  const double d = x - mean;
  return -0.5 * std::log(kTwoPi * variance) - d * d / (2.0 * variance);
}

double log_inverse_gamma_density(double x, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("inverse-gamma parameters must be > 0");
  if (!(x > 0.0)) throw std::domain_error("inverse-gamma support is x > 0");
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) -
         scale / x;
}

double log_joint(const PixelObservation& y, const EndmemberLibrary& lib,
                 const ModelParams& params, const PriorHyperparams& hyper) {
  hyper.validate();
  if (!(params.sigma_b2 > 0.0)) throw std::domain_error("sigma_b2 must be > 0");
  double lp = log_likelihood(y, lib, params);
  lp += log_dirichlet_prior(params.abundance, hyper.beta);
  lp += log_normal_density(params.b, 0.0, params.sigma_b2);
  lp += -std::log(params.sigma2);  // Jeffreys prior on sigma^2
  lp += log_inverse_gamma_density(params.sigma_b2, hyper.gamma, hyper.nu);
  return lp;
}

}  // namespace unmix
