#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "unmix/histogram.hpp"
#include "unmix/sampler.hpp"
#include "unmix/types.hpp"

namespace unmix {

struct SyntheticScenario {
  EndmemberLibrary library;
  AbundanceVector true_abundance = {0.3, 0.7, 0.0, 0.0, 0.0, 0.0};
  double true_b = 0.2;
  double noise_sigma = 0.05;  // additive Gaussian noise sd, reflectance units
  int n_runs = 20;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

struct RunRecord {
  ModelParams estimate;                  // posterior mean
  double acceptance_rate = 0.0;
  double final_step = 0.0;
  PixelObservation observation;          // the noisy pixel this run unmixed
  std::vector<double> reconstruction;    // forward model at the estimate
};

struct PooledStats {
  double mean = 0.0;
  double sd = 0.0;
  std::int64_t n = 0;
};

struct ExperimentResult {
  double mse = 0.0;  // mean squared abundance error over runs
  double re = 0.0;   // root-mean-square per-band reconstruction error
  std::vector<RunRecord> runs;
  // Post-burn-in samples pooled across runs: "a1", "a2", "a3" over [0,1],
  // "b" over its empirical range. 50 bins each.
  std::map<std::string, Histogram> histograms;
  std::map<std::string, PooledStats> pooled_stats;  // same keys as histograms
};

struct ExperimentOptions {
  bool baseline = false;   // force beta = 1 (uniform abundance prior)
  int jobs = 0;            // 0 = all available threads, 1 = serial reference
  int hist_bins = 50;
  std::string trace_dir;   // when nonempty, write one trace CSV per run
};

// forward model at (true_abundance, true_b) plus i.i.d. Gaussian noise.
PixelObservation generate_pixel(const SyntheticScenario& scenario, RngState& rng);

// (1/P) sum_p ||estimate_p - truth_p||^2
double mse(const std::vector<AbundanceVector>& estimates,
           const std::vector<AbundanceVector>& truths);

// sqrt( (1/(P L)) sum_p ||reconstruction_p - observation_p||^2 )
double re(const std::vector<std::vector<double>>& reconstructions,
          const std::vector<PixelObservation>& observations);

// Runs n_runs independent pixels: generate, run_chain, posterior_mean;
// aggregates MSE/RE and pools histograms in run order. Runs execute in
// parallel when jobs != 1; results are identical to the serial path.
ExperimentResult run_experiment(const SyntheticScenario& scenario, const SamplerConfig& config,
                                const ExperimentOptions& options);

ExperimentResult run_experiment(const SyntheticScenario& scenario, const SamplerConfig& config,
                                bool baseline);

}  // namespace unmix
