#pragma once

#include "unmix/types.hpp"

namespace unmix {

// M * a, the linear mixture.
std::vector<double> mix_linear(const EndmemberLibrary& lib, const AbundanceVector& a);

// h(a) = (M a) .* (M a), the quadratic interaction term.
std::vector<double> nonlinear_term(const EndmemberLibrary& lib, const AbundanceVector& a);

// Post-nonlinear forward model g_b(M a) = M a + b * (M a) .* (M a).
std::vector<double> forward_ppnmm(const EndmemberLibrary& lib, const AbundanceVector& a,
                                  double b);

// Gaussian log likelihood, normalization included:
//   -(L/2) log(2 pi sigma^2) - ||y - g_b(M a)||^2 / (2 sigma^2)
double log_likelihood(const PixelObservation& y, const EndmemberLibrary& lib,
                      const ModelParams& params);

// Symmetric Dirichlet log density with its normalization constant.
// All coordinates must be strictly positive.
double log_dirichlet_prior(const AbundanceVector& a, double beta);

double log_normal_density(double x, double mean, double variance);

// Inverse-Gamma in the shape/scale parameterization:
// density proportional to x^(-shape-1) exp(-scale/x).
double log_inverse_gamma_density(double x, double shape, double scale);

// Unnormalized log posterior of {a, b, sigma^2, sigma_b^2}:
// likelihood + Dirichlet(a) + N(b; 0, sigma_b^2) + Jeffreys(sigma^2)
// + InverseGamma(sigma_b^2; gamma, nu).
double log_joint(const PixelObservation& y, const EndmemberLibrary& lib,
                 const ModelParams& params, const PriorHyperparams& hyper);

// Helpers shared with the sampler.
double sum_squared_residual(const std::vector<double>& y, const std::vector<double>& model);
std::vector<double> apply_post_nonlinearity(const std::vector<double>& mix, double b);

}  // namespace unmix
