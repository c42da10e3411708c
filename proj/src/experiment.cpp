#include "unmix/experiment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "unmix/errors.hpp"
#include "unmix/io.hpp"
#include "unmix/model.hpp"

namespace unmix {

namespace {

// Per-run RNG streams: the pixel noise and the chain get separate seeds so
// their draw sequences never overlap.
std::uint64_t pixel_seed(std::uint64_t base, int run) { return base + 2 * static_cast<std::uint64_t>(run); }
std::uint64_t chain_seed(std::uint64_t base, int run) { return base + 2 * static_cast<std::uint64_t>(run) + 1; }

struct RunOutput {
  RunRecord record;
  // Post-burn-in draws of the pooled components, in iteration order.
  std::vector<std::vector<double>> pooled_abundance;  // one vector per tracked component
  std::vector<double> pooled_b;
};

RunOutput execute_run(const SyntheticScenario& sc, const SamplerConfig& cfg, int run,
                      int n_pooled, const std::string& trace_dir) {
  RngState noise_rng(pixel_seed(sc.seed, run));
  PixelObservation pixel = generate_pixel(sc, noise_rng);

  SamplerConfig run_cfg = cfg;
  run_cfg.seed = chain_seed(sc.seed, run);
  Chain chain = run_chain(pixel, sc.library, run_cfg);

  RunOutput out;
  out.record.estimate = posterior_mean(chain, run_cfg.burn_in);
  out.record.acceptance_rate = chain.acceptance_rate();
  out.record.final_step = chain.final_step;
  out.record.observation = pixel;
  out.record.reconstruction =
      forward_ppnmm(sc.library, out.record.estimate.abundance, out.record.estimate.b);

  out.pooled_abundance.resize(static_cast<std::size_t>(n_pooled));
  const int kept = run_cfg.n_iter - run_cfg.burn_in;
  for (auto& v : out.pooled_abundance) v.reserve(static_cast<std::size_t>(kept));
  out.pooled_b.reserve(static_cast<std::size_t>(kept));
  for (int t = run_cfg.burn_in; t < run_cfg.n_iter; ++t) {
    const ModelParams& s = chain.samples[t];
    for (int c = 0; c < n_pooled; ++c) out.pooled_abundance[c].push_back(s.abundance[c]);
    out.pooled_b.push_back(s.b);
  }

  if (!trace_dir.empty()) {
    write_text_file(trace_dir + "/trace_run" + std::to_string(run + 1) + ".csv",
                    write_trace_csv(chain));
  }
  return out;
}

PooledStats pooled_moments(const std::vector<double>& values) {
  PooledStats st;
  st.n = static_cast<std::int64_t>(values.size());
  if (st.n == 0) return st;
  for (double v : values) st.mean += v;
  st.mean /= static_cast<double>(st.n);
  double ss = 0.0;
  for (double v : values) ss += (v - st.mean) * (v - st.mean);
  st.sd = std::sqrt(ss / static_cast<double>(st.n));
  return st;
}

}  // namespace

void SyntheticScenario::validate() const {
  library.validate();
  validate_abundance(true_abundance);
  if (static_cast<int>(true_abundance.size()) != library.endmembers())
    throw ValidationError("true_abundance length does not match the library");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  if (n_runs < 1) throw ValidationError("n_runs must be >= 1");
}

PixelObservation generate_pixel(const SyntheticScenario& scenario, RngState& rng) {
  std::vector<double> y = forward_ppnmm(scenario.library, scenario.true_abundance,
                                        scenario.true_b);
  if (scenario.noise_sigma > 0.0) {
    for (double& v : y) v += rng.normal(0.0, scenario.noise_sigma * scenario.noise_sigma);
  }
  return PixelObservation{std::move(y)};
}

double mse(const std::vector<AbundanceVector>& estimates,
           const std::vector<AbundanceVector>& truths) {
  if (estimates.empty() || estimates.size() != truths.size())
    throw std::invalid_argument("mse needs equal-length nonempty lists");
  double acc = 0.0;
  for (std::size_t p = 0; p < estimates.size(); ++p) {
    if (estimates[p].size() != truths[p].size())
      throw std::invalid_argument("mse dimension mismatch at pair " + std::to_string(p));
    for (std::size_t r = 0; r < estimates[p].size(); ++r) {
      const double d = estimates[p][r] - truths[p][r];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(estimates.size());
}

double re(const std::vector<std::vector<double>>& reconstructions,
          const std::vector<PixelObservation>& observations) {
  if (reconstructions.empty() || reconstructions.size() != observations.size())
    throw std::invalid_argument("re needs equal-length nonempty lists");
  const std::size_t L = observations.front().reflectance.size();
  double acc = 0.0;
  for (std::size_t p = 0; p < reconstructions.size(); ++p) {
    if (reconstructions[p].size() != L || observations[p].reflectance.size() != L)
      throw std::invalid_argument("re band-count mismatch at pair " + std::to_string(p));
    acc += sum_squared_residual(observations[p].reflectance, reconstructions[p]);
  }
  return std::sqrt(acc / (static_cast<double>(reconstructions.size()) * L));
}

ExperimentResult run_experiment(const SyntheticScenario& scenario, const SamplerConfig& config,
                                const ExperimentOptions& options) {
  scenario.validate();
  config.validate();

  SamplerConfig cfg = config;
  if (options.baseline) cfg.hyper.beta = 1.0;

  const int n = scenario.n_runs;
  const int n_pooled = std::min(3, scenario.library.endmembers());
  std::vector<RunOutput> outputs(static_cast<std::size_t>(n));
  std::vector<std::string> failures(static_cast<std::size_t>(n));

  int jobs = options.jobs;
#ifdef _OPENMP
  if (jobs <= 0) jobs = omp_get_max_threads();
#else
  jobs = 1;
#endif

  if (jobs == 1) {
    // Serial reference path; the parallel loop below must match it bit for bit.
    for (int i = 0; i < n; ++i) {
      try {
        outputs[i] = execute_run(scenario, cfg, i, n_pooled, options.trace_dir);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (int i = 0; i < n; ++i) {
      try {
        outputs[i] = execute_run(scenario, cfg, i, n_pooled, options.trace_dir);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!failures[i].empty())
      throw std::runtime_error("run " + std::to_string(i + 1) + ": " + failures[i]);
  }

  ExperimentResult result;
  result.runs.reserve(static_cast<std::size_t>(n));
  std::vector<AbundanceVector> estimates, truths;
  std::vector<std::vector<double>> recons;
  std::vector<PixelObservation> observations;
  for (int i = 0; i < n; ++i) {
    RunRecord& rec = outputs[i].record;
    estimates.push_back(rec.estimate.abundance);
    truths.push_back(scenario.true_abundance);
    recons.push_back(rec.reconstruction);
    observations.push_back(rec.observation);
    result.runs.push_back(std::move(rec));
  }
  result.mse = mse(estimates, truths);
  result.re = re(recons, observations);

  // Pool post-burn-in samples across runs, in run order.
  for (int c = 0; c < n_pooled; ++c) {
    std::vector<double> pooled;
    for (int i = 0; i < n; ++i) {
      const auto& part = outputs[i].pooled_abundance[c];
      pooled.insert(pooled.end(), part.begin(), part.end());
    }
    const std::string key = "a" + std::to_string(c + 1);
    result.histograms[key] = make_histogram(pooled, 0.0, 1.0, options.hist_bins);
    result.pooled_stats[key] = pooled_moments(pooled);
  }
  std::vector<double> pooled_b;
  for (int i = 0; i < n; ++i)
    pooled_b.insert(pooled_b.end(), outputs[i].pooled_b.begin(), outputs[i].pooled_b.end());
  result.histograms["b"] = make_histogram(pooled_b, options.hist_bins);
  result.pooled_stats["b"] = pooled_moments(pooled_b);

  return result;
}

ExperimentResult run_experiment(const SyntheticScenario& scenario, const SamplerConfig& config,
                                bool baseline) {
  ExperimentOptions options;
  options.baseline = baseline;
  return run_experiment(scenario, config, options);
}

}  // namespace unmix
