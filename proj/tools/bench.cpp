// Compares the serial reference experiment loop against the OpenMP-parallel
// one: same seeds, bit-identical results required, wall time reported.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "unmix/bundled_library.hpp"
#include "unmix/experiment.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const unmix::ExperimentResult& a, const unmix::ExperimentResult& b) {
  if (a.mse != b.mse || a.re != b.re || a.runs.size() != b.runs.size()) return false;
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    if (a.runs[i].estimate.abundance != b.runs[i].estimate.abundance) return false;
    if (a.runs[i].estimate.b != b.runs[i].estimate.b) return false;
    if (a.runs[i].estimate.sigma2 != b.runs[i].estimate.sigma2) return false;
  }
  for (const auto& [key, hist] : a.histograms) {
    const auto it = b.histograms.find(key);
    if (it == b.histograms.end() || it->second.counts != hist.counts) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int n_runs = 8;
  int n_iter = 4000;
  if (argc > 1) n_runs = std::atoi(argv[1]);
  if (argc > 2) n_iter = std::atoi(argv[2]);

  unmix::SyntheticScenario sc;
  sc.library = unmix::bundled_library();
  sc.n_runs = n_runs;

  unmix::SamplerConfig cfg;
  cfg.n_iter = n_iter;
  cfg.burn_in = n_iter / 4;

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("benchmark: %d runs x %d iterations, %d thread(s) available\n", n_runs, n_iter,
              threads);

  unmix::ExperimentOptions serial_opts;
  serial_opts.jobs = 1;
  auto t0 = std::chrono::steady_clock::now();
  const unmix::ExperimentResult serial = unmix::run_experiment(sc, cfg, serial_opts);
  const double t_serial = seconds_since(t0);

  unmix::ExperimentOptions parallel_opts;
  parallel_opts.jobs = 0;  // all threads
  t0 = std::chrono::steady_clock::now();
  const unmix::ExperimentResult parallel = unmix::run_experiment(sc, cfg, parallel_opts);
  const double t_parallel = seconds_since(t0);

  std::printf("serial reference : %.3f s\n", t_serial);
  std::printf("openmp (all)     : %.3f s\n", t_parallel);
  std::printf("speedup          : %.2fx\n", t_parallel > 0 ? t_serial / t_parallel : 0.0);

  if (!identical(serial, parallel)) {
    std::printf("FAIL: serial and parallel results differ\n");
    return 1;
  }
  std::printf("results identical: yes (mse %.6g, re %.6g)\n", serial.mse, serial.re);
  return 0;
}
