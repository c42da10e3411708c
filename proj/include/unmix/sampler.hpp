#pragma once

#include <cstdint>
#include <vector>

#include "unmix/histogram.hpp"
#include "unmix/model.hpp"
#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

struct SamplerConfig {
  int n_iter = 10000;
  int burn_in = 1000;
  PriorHyperparams hyper;        // beta=0.5, gamma=1, nu=0.01
  double proposal_step = 0.05;   // random-walk sd on the free abundance coords
  bool adapt = true;             // tune the step during burn-in only
  double target_accept = 0.3;
  std::uint64_t seed = kDefaultSeed;

  // Diagnostic mode: drops the likelihood from the Metropolis ratio and
  // skips the b / sigma^2 draws, so the abundance chain targets the prior.
  bool prior_only = false;

  void validate() const;
};

struct Chain {
  std::vector<ModelParams> samples;  // one record per iteration
  std::int64_t accept_count_a = 0;
  std::int64_t proposal_count_a = 0;
  double final_step = 0.0;

  double acceptance_rate() const {
    return proposal_count_a > 0 ? static_cast<double>(accept_count_a) / proposal_count_a : 0.0;
  }
};

struct GaussianParams {
  double mean;
  double variance;
};

// Exact Gaussian conditional of the nonlinearity coefficient b:
//   N( s_b^2 (y-Ma)'h / (s_b^2 h'h + s^2),  s_b^2 s^2 / (s_b^2 h'h + s^2) )
GaussianParams b_conditional_params(const PixelObservation& y, const EndmemberLibrary& lib,
                                    const AbundanceVector& a, double sigma2, double sigma_b2);

double sample_b_conditional(RngState& rng, const PixelObservation& y,
                            const EndmemberLibrary& lib, const AbundanceVector& a,
                            double sigma2, double sigma_b2);

// InverseGamma(L/2, ||y - g_b(Ma)||^2 / 2). Throws std::domain_error on an
// exactly zero residual (degenerate conditional).
double sample_sigma2_conditional(RngState& rng, const PixelObservation& y,
                                 const EndmemberLibrary& lib, const AbundanceVector& a,
                                 double b);

// InverseGamma(1/2 + gamma, b^2/2 + nu).
double sample_sigma_b2_conditional(RngState& rng, double b, const PriorHyperparams& hyper);

// Log of the abundance conditional's kernel at `a`:
//   -||y - g_b(Ma)||^2 / (2 sigma^2) + (beta - 1) sum_r log a_r
// The likelihood term is dropped in prior-only mode.
double abundance_log_target(const PixelObservation& y, const EndmemberLibrary& lib,
                            const AbundanceVector& a, double b, double sigma2, double beta,
                            bool prior_only = false);

struct AbundanceStep {
  AbundanceVector abundance;
  bool accepted;
  double accept_prob;  // min(1, exp(delta)); 0 for floor-rejected proposals
};

// Symmetric Gaussian random walk on the first R-1 coordinates; the last
// coordinate absorbs the sum constraint. Proposals with any coordinate
// below kAbundanceFloor are rejected outright.
AbundanceStep metropolis_step_abundance(RngState& rng, const PixelObservation& y,
                                        const EndmemberLibrary& lib, const ModelParams& params,
                                        const PriorHyperparams& hyper, double step,
                                        bool prior_only = false);

// One Metropolis-within-Gibbs chain. Sweep order: abundance Metropolis
// step, then b, then sigma^2, then sigma_b^2; the post-sweep state is
// recorded every iteration.
Chain run_chain(const PixelObservation& y, const EndmemberLibrary& lib,
                const SamplerConfig& config);

// Componentwise mean over samples[burn_in..]; the abundance mean is
// renormalized to unit sum.
ModelParams posterior_mean(const Chain& chain, int burn_in);

struct ComponentRef {
  enum class Kind { abundance, b, sigma2, sigma_b2 };
  Kind kind = Kind::abundance;
  int index = 0;  // abundance component, ignored otherwise

  static ComponentRef a(int r) { return {Kind::abundance, r}; }
  static ComponentRef b() { return {Kind::b, 0}; }
  static ComponentRef sigma2() { return {Kind::sigma2, 0}; }
  static ComponentRef sigma_b2() { return {Kind::sigma_b2, 0}; }
};

// Post-burn-in histogram of one component. Abundance components are
// binned over [0, 1]; the others over their empirical range.
Histogram posterior_histogram(const Chain& chain, ComponentRef component, int burn_in,
                              int bins);

}  // namespace unmix
