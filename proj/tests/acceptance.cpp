// Acceptance suite: every release gate in one binary, one PASS/FAIL line
// each. Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "unmix/bundled_library.hpp"
#include "unmix/experiment.hpp"
#include "unmix/io.hpp"
#include "unmix/model.hpp"
#include "unmix/sampler.hpp"

namespace fs = std::filesystem;
using namespace unmix;

namespace {

int g_failures = 0;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("criterion %d (%s): %s (%s)\n", criterion, name.c_str(), ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// --- criterion 1: conditional log densities against log_joint -------------

void criterion_conditionals() {
  const double t0 = now_seconds();
  const int L = 20, R = 4;
  const EndmemberLibrary lib = testutil::random_library(L, R, 1001);
  RngState rng(1002);
  const PriorHyperparams hyper;
  double worst = 0.0;

  for (int rep = 0; rep < 100; ++rep) {
    ModelParams p;
    p.abundance = rng.dirichlet(1.0, R);
    p.b = rng.normal(0.0, 0.25);
    p.sigma2 = 0.01 + rng.uniform();
    p.sigma_b2 = 0.1 + rng.uniform();
    PixelObservation y;
    y.reflectance.resize(L);
    for (double& v : y.reflectance) v = rng.uniform();
    const double base = log_joint(y, lib, p, hyper);

    {
      ModelParams q = p;
      q.b = rng.normal(0.0, 1.0);
      const GaussianParams g = b_conditional_params(y, lib, p.abundance, p.sigma2, p.sigma_b2);
      const double lhs = log_joint(y, lib, q, hyper) - base;
      const double rhs = log_normal_density(q.b, g.mean, g.variance) -
                         log_normal_density(p.b, g.mean, g.variance);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    {
      ModelParams q = p;
      q.sigma2 = 0.01 + rng.uniform();
      const double scale =
          0.5 * sum_squared_residual(y.reflectance, forward_ppnmm(lib, p.abundance, p.b));
      const double lhs = log_joint(y, lib, q, hyper) - base;
      const double rhs = log_inverse_gamma_density(q.sigma2, 0.5 * L, scale) -
                         log_inverse_gamma_density(p.sigma2, 0.5 * L, scale);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    {
      ModelParams q = p;
      q.sigma_b2 = 0.1 + rng.uniform();
      const double lhs = log_joint(y, lib, q, hyper) - base;
      const double rhs =
          log_inverse_gamma_density(q.sigma_b2, 0.5 + hyper.gamma, 0.5 * p.b * p.b + hyper.nu) -
          log_inverse_gamma_density(p.sigma_b2, 0.5 + hyper.gamma, 0.5 * p.b * p.b + hyper.nu);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  const double elapsed = now_seconds() - t0;
  report(1, "conditional correctness", worst <= 1e-8 && elapsed < 1.0,
         fmt("max |diff| = %.3g over 100 instances, %.2f s", worst, elapsed));
}

// --- criterion 2: conditional sampler moments ------------------------------

void criterion_sampler_moments() {
  const double t0 = now_seconds();
  bool ok = true;
  std::string detail;

  {  // b-conditional stream at fixed inputs
    const EndmemberLibrary lib = testutil::random_library(20, 4, 1011);
    RngState setup(1012);
    const AbundanceVector a = setup.dirichlet(1.0, 4);
    PixelObservation y;
    y.reflectance.resize(20);
    for (double& v : y.reflectance) v = setup.uniform();
    const double sigma2 = 0.04, sigma_b2 = 0.5;
    const GaussianParams g = b_conditional_params(y, lib, a, sigma2, sigma_b2);

    RngState rng(1013);
    const int n = 100000;
    std::vector<double> draws(n);
    for (double& d : draws) d = sample_b_conditional(rng, y, lib, a, sigma2, sigma_b2);
    const double m = testutil::mean(draws);
    const double v = testutil::variance(draws);
    const double mean_tol = 3.0 * std::sqrt(g.variance) / std::sqrt(double(n));
    ok = ok && std::abs(m - g.mean) <= mean_tol && std::abs(v - g.variance) <= 0.03 * g.variance;
    detail += fmt("b: |dmean| %.2g<=%.2g |dvar|/var %.3f; ", std::abs(m - g.mean), mean_tol,
                  std::abs(v - g.variance) / g.variance);
  }

  {  // sigma2 conditional at IG(2, 1): residual [1,1,0,0], b = 0
    EndmemberLibrary lib;
    lib.wavelengths = {0.4, 0.5, 0.6, 0.7};
    lib.names = {"A", "B"};
    lib.spectra.assign(8, 1.0);
    PixelObservation y{{2.0, 2.0, 1.0, 1.0}};
    RngState rng(1014);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_sigma2_conditional(rng, y, lib, {0.5, 0.5}, 0.0);
    const double m = sum / n;
    ok = ok && std::abs(m - 1.0) <= 0.05;
    detail += fmt("sigma2: mean %.4f; ", m);
  }

  {  // sigma_b2 conditional at b = 0.2, (gamma, nu) = (1, 0.01): IG(1.5, 0.03), mean 0.06
    RngState rng(1015);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_sigma_b2_conditional(rng, 0.2, PriorHyperparams{});
    const double m = sum / n;
    ok = ok && std::abs(m - 0.06) <= 0.006;
    detail += fmt("sigma_b2: mean %.4f", m);
  }

  const double elapsed = now_seconds() - t0;
  report(2, "sampler moment checks", ok && elapsed < 5.0,
         detail + fmt(", %.2f s", elapsed));
}

// --- criterion 3: prior-only chain recovers Dirichlet(0.5) ----------------

void criterion_prior_recovery() {
  const double t0 = now_seconds();
  const EndmemberLibrary lib = testutil::random_library(12, 3, 1021);
  PixelObservation y;
  y.reflectance.assign(12, 0.5);

  SamplerConfig cfg;
  cfg.prior_only = true;
  cfg.hyper.beta = 0.5;
  cfg.burn_in = 2000;
  cfg.n_iter = cfg.burn_in + 100000;
  cfg.seed = 1;
  const Chain chain = run_chain(y, lib, cfg);

  const double expected_var = (1.0 / 3.0) * (2.0 / 3.0) / (0.5 * 3.0 + 1.0);  // 0.088889
  bool ok = true;
  std::string detail;
  for (int r = 0; r < 3; ++r) {
    std::vector<double> comp;
    comp.reserve(100000);
    for (int t = cfg.burn_in; t < cfg.n_iter; ++t)
      comp.push_back(chain.samples[t].abundance[r]);
    const double m = testutil::mean(comp);
    const double v = testutil::variance(comp);
    ok = ok && std::abs(m - 1.0 / 3.0) <= 0.02 && std::abs(v - expected_var) <= 0.2 * expected_var;
    detail += fmt("a%d: mean %.4f var %.4f; ", r + 1, m, v);
  }
  const double elapsed = now_seconds() - t0;
  report(3, "prior recovery", ok && elapsed < 30.0, detail + fmt("%.1f s", elapsed));
}

// --- criteria 4-6 share the full-scale experiment --------------------------

void criteria_full_experiment() {
  SyntheticScenario sc;
  sc.library = bundled_library();

  SamplerConfig cfg;  // defaults: 10000 iterations, 1000 burn-in, beta 0.5

  const double t0 = now_seconds();
  const ExperimentResult sdp = run_experiment(sc, cfg, false);
  const ExperimentResult base = run_experiment(sc, cfg, true);
  const double elapsed_full = now_seconds() - t0;

  {  // criterion 4: point estimate recovery, full protocol then --quick scale
    double a1 = 0.0, b = 0.0;
    for (const RunRecord& run : sdp.runs) {
      a1 += run.estimate.abundance[0];
      b += run.estimate.b;
    }
    a1 /= sdp.runs.size();
    b /= sdp.runs.size();
    const bool full_ok = std::abs(a1 - 0.30) <= 0.03 && std::abs(b - 0.2) <= 0.05;

    SyntheticScenario quick_sc = sc;
    quick_sc.n_runs = 5;
    SamplerConfig quick_cfg = cfg;
    quick_cfg.n_iter = 2000;
    quick_cfg.burn_in = 500;
    const ExperimentResult quick = run_experiment(quick_sc, quick_cfg, false);
    double qa1 = 0.0, qb = 0.0;
    for (const RunRecord& run : quick.runs) {
      qa1 += run.estimate.abundance[0];
      qb += run.estimate.b;
    }
    qa1 /= quick.runs.size();
    qb /= quick.runs.size();
    const bool quick_ok = std::abs(qa1 - 0.30) <= 0.06 && std::abs(qb - 0.2) <= 0.10;

    report(4, "point estimate recovery", full_ok && quick_ok,
           fmt("full: a1 %.4f b %.4f; quick: a1 %.4f b %.4f; %.1f s", a1, b, qa1, qb,
               now_seconds() - t0));
  }

  {  // criterion 5: sparse prior beats the uniform prior on paired pixels
    const double ratio = sdp.mse / base.mse;
    const bool ok = sdp.mse < base.mse && ratio < 0.8 && sdp.re >= 0.03 && sdp.re <= 0.08 &&
                    base.re >= 0.03 && base.re <= 0.08;
    report(5, "error ordering vs uniform prior", ok,
           fmt("MSE %.3g vs %.3g (ratio %.3f), RE %.4f vs %.4f", sdp.mse, base.mse, ratio,
               sdp.re, base.re));
  }

  {  // criterion 6: sparsity concentration of a3 near zero
    const double sdp_mass = sdp.histograms.at("a3").mass_below(0.04);
    const double base_mass = base.histograms.at("a3").mass_below(0.04);
    const double sdp_sd = sdp.pooled_stats.at("a3").sd;
    const double base_sd = base.pooled_stats.at("a3").sd;
    const bool ok = sdp_mass > base_mass && sdp_sd < base_sd;
    report(6, "sparsity concentration of a3", ok,
           fmt("mass[0,0.04): %.4f vs %.4f; sd: %.5f vs %.5f", sdp_mass, base_mass, sdp_sd,
               base_sd));
  }

  (void)elapsed_full;
}

// --- criterion 7: metric identities ----------------------------------------

void criterion_metric_identities() {
  const std::vector<AbundanceVector> truth{{0.3, 0.7, 0.0, 0.0, 0.0, 0.0}};
  const bool zero_ok = mse(truth, truth) == 0.0;

  const std::vector<AbundanceVector> est{{0.31, 0.69, 0.0, 0.0, 0.0, 0.0}};
  const double mse_val = mse(est, truth);

  const std::vector<std::vector<double>> recon{{0.2, 0.3, 0.4, 0.5}};
  const std::vector<PixelObservation> obs{PixelObservation{{0.1, 0.2, 0.3, 0.4}}};
  const double re_val = re(recon, obs);
  const bool re_zero_ok = re({obs[0].reflectance}, obs) == 0.0;

  const bool ok = zero_ok && re_zero_ok && std::abs(mse_val - 2e-4) <= 1e-15 &&
                  std::abs(re_val - 0.1) <= 1e-15;
  report(7, "metric identities", ok,
         fmt("mse-at-truth 0: %d, mse %.17g, re %.17g", zero_ok, mse_val, re_val));
}

// --- criterion 8: byte-identical reproduce output ---------------------------

bool run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return status != -1 && WEXITSTATUS(status) == 0;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = ss.str();
  }
  return files;
}

void criterion_determinism() {
  const char* cli = std::getenv("UNMIX_CLI");
  if (cli == nullptr) {
    report(8, "reproduce determinism", false, "UNMIX_CLI not set");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "unmix_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path out1 = root / "rep1";
  const fs::path out2 = root / "rep2";
  const std::string base_cmd = std::string(cli) + " reproduce --quick --seed 123 --out ";
  const bool ran = run_command(base_cmd + out1.string() + " > " + (root / "log1").string()) &&
                   run_command(base_cmd + out2.string() + " > " + (root / "log2").string());
  if (!ran) {
    report(8, "reproduce determinism", false, "cmd_reproduce exited nonzero");
    return;
  }
  const auto s1 = snapshot_dir(out1);
  const auto s2 = snapshot_dir(out2);
  bool ok = s1.size() == s2.size() && !s1.empty();
  std::string mismatch;
  for (const auto& [rel, content] : s1) {
    const auto it = s2.find(rel);
    if (it == s2.end() || it->second != content) {
      ok = false;
      mismatch = rel;
      break;
    }
  }
  report(8, "reproduce determinism", ok,
         ok ? fmt("%zu files byte-identical", s1.size()) : "differs at " + mismatch);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_conditionals();
  criterion_sampler_moments();
  criterion_prior_recovery();
  criteria_full_experiment();
  criterion_metric_identities();
  criterion_determinism();
  std::printf("================\n%s (%d failure%s)\n", g_failures == 0 ? "ALL PASS" : "FAILED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures;
}
