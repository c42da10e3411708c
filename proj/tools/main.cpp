// Command-line front end: synthesize pixels, unmix them, and reproduce the
// synthetic two-endmember experiment with paired sparse/uniform priors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "unmix/bundled_library.hpp"
#include "unmix/errors.hpp"
#include "unmix/experiment.hpp"
#include "unmix/io.hpp"
#include "unmix/model.hpp"
#include "unmix/sampler.hpp"
#include "unmix/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes, stable across releases:
//   0 success, 1 usage error, 2 input parse/validation error,
//   3 runtime error (numerical failure or incompatible inputs).
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string library_path;
  std::string config_path;
  std::string pixel_path;
  std::string out_path;
  bool quick = false;
  bool trace = false;
  int jobs = 0;
  // Overrides; negative/absent means "not set".
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_beta = false;
  double beta = 0.0;
  bool has_iters = false;
  int iters = 0;
  bool has_burn_in = false;
  int burn_in = 0;
  bool has_runs = false;
  int runs = 0;
  bool has_noise = false;
  double noise_sigma = 0.0;
};

unmix::EndmemberLibrary load_library(const Options& opt) {
  if (opt.library_path.empty()) return unmix::bundled_library();
  return unmix::load_library_file(opt.library_path);
}

std::pair<unmix::SyntheticScenario, unmix::SamplerConfig> load_effective_config(
    const Options& opt) {
  auto pair = opt.config_path.empty()
                  ? unmix::load_config("")
                  : unmix::load_config_file(opt.config_path);
  auto& [sc, cfg] = pair;
  if (opt.has_seed) {
    sc.seed = opt.seed;
    cfg.seed = opt.seed;
  }
  if (opt.has_beta) cfg.hyper.beta = opt.beta;
  if (opt.has_iters) cfg.n_iter = opt.iters;
  if (opt.has_burn_in) cfg.burn_in = opt.burn_in;
  if (opt.has_runs) sc.n_runs = opt.runs;
  if (opt.has_noise) sc.noise_sigma = opt.noise_sigma;
  return pair;
}

json library_json(const unmix::EndmemberLibrary& lib) {
  return json{{"bands", lib.bands()},
              {"endmembers", lib.endmembers()},
              {"names", lib.names},
              {"wavelength_min", lib.wavelengths.front()},
              {"wavelength_max", lib.wavelengths.back()}};
}

json config_json(const unmix::SamplerConfig& cfg) {
  return json{{"beta", cfg.hyper.beta},
              {"gamma", cfg.hyper.gamma},
              {"nu", cfg.hyper.nu},
              {"n_iter", cfg.n_iter},
              {"burn_in", cfg.burn_in},
              {"proposal_step", cfg.proposal_step},
              {"adapt", cfg.adapt},
              {"target_accept", cfg.target_accept},
              {"seed", cfg.seed}};
}

json scenario_json(const unmix::SyntheticScenario& sc) {
  return json{{"true_a", sc.true_abundance},
              {"true_b", sc.true_b},
              {"noise_sigma", sc.noise_sigma},
              {"n_runs", sc.n_runs},
              {"seed", sc.seed},
              {"library", library_json(sc.library)}};
}

void dump_json(const std::string& path, const json& j) {
  unmix::write_text_file(path, j.dump(2) + "\n");
}

int cmd_validate_library(const Options& opt) {
  const unmix::EndmemberLibrary lib = unmix::load_library_file(opt.library_path);
  std::printf("ok: %d bands, %d endmembers, wavelengths %.4f-%.4f\n", lib.bands(),
              lib.endmembers(), lib.wavelengths.front(), lib.wavelengths.back());
  std::string names;
  for (const auto& n : lib.names) names += (names.empty() ? "" : ", ") + n;
  std::printf("endmembers: %s\n", names.c_str());
  return kExitOk;
}

int cmd_synth(const Options& opt) {
  auto [sc, cfg] = load_effective_config(opt);
  sc.library = load_library(opt);
  sc.validate();

  unmix::RngState rng(sc.seed);
  const unmix::PixelObservation pixel = unmix::generate_pixel(sc, rng);
  unmix::write_text_file(opt.out_path,
                         unmix::write_pixel_csv(sc.library.wavelengths, pixel.reflectance));

  json prov{{"true_a", sc.true_abundance},
            {"true_b", sc.true_b},
            {"noise_sigma", sc.noise_sigma},
            {"seed", sc.seed},
            {"library", library_json(sc.library)}};
  dump_json(opt.out_path + ".provenance.json", prov);
  return kExitOk;
}

int cmd_unmix(const Options& opt) {
  const unmix::EndmemberLibrary lib = load_library(opt);
  const unmix::PixelFile pixel_file = unmix::load_pixel_file(opt.pixel_path);
  auto [sc, cfg] = load_effective_config(opt);

  if (pixel_file.pixel.bands() != lib.bands()) {
    std::fprintf(stderr, "error: pixel has %d bands but library has %d\n",
                 pixel_file.pixel.bands(), lib.bands());
    return kExitRuntime;
  }

  const unmix::Chain chain = unmix::run_chain(pixel_file.pixel, lib, cfg);
  const unmix::ModelParams est = unmix::posterior_mean(chain, cfg.burn_in);

  fs::create_directories(opt.out_path);
  const std::string dir = opt.out_path + "/";

  json summary{{"config", config_json(cfg)},
               {"library", library_json(lib)},
               {"posterior_mean",
                json{{"abundance", est.abundance},
                     {"b", est.b},
                     {"sigma2", est.sigma2},
                     {"sigma_b2", est.sigma_b2}}},
               {"acceptance_rate", chain.acceptance_rate()},
               {"final_step", chain.final_step},
               {"samples_kept", cfg.n_iter - cfg.burn_in}};
  dump_json(dir + "summary.json", summary);

  constexpr int kBins = 50;
  for (int r = 0; r < lib.endmembers(); ++r) {
    const auto hist = unmix::posterior_histogram(chain, unmix::ComponentRef::a(r),
                                                 cfg.burn_in, kBins);
    unmix::write_text_file(dir + "hist_a" + std::to_string(r + 1) + ".csv",
                           unmix::write_histogram_csv(hist));
  }
  unmix::write_text_file(
      dir + "hist_b.csv",
      unmix::write_histogram_csv(
          unmix::posterior_histogram(chain, unmix::ComponentRef::b(), cfg.burn_in, kBins)));

  if (opt.trace) unmix::write_text_file(dir + "trace.csv", unmix::write_trace_csv(chain));
  return kExitOk;
}

json experiment_json(const unmix::ExperimentResult& res) {
  json runs = json::array();
  for (const auto& run : res.runs) {
    runs.push_back(json{{"abundance", run.estimate.abundance},
                        {"b", run.estimate.b},
                        {"sigma2", run.estimate.sigma2},
                        {"sigma_b2", run.estimate.sigma_b2},
                        {"acceptance_rate", run.acceptance_rate},
                        {"final_step", run.final_step}});
  }
  json stats;
  for (const auto& [key, st] : res.pooled_stats)
    stats[key] = json{{"mean", st.mean}, {"sd", st.sd}, {"n", st.n}};
  return json{{"mse", res.mse},
              {"re", res.re},
              {"mse_x100", res.mse * 100.0},
              {"re_x100", res.re * 100.0},
              {"per_run_estimates", runs},
              {"pooled_stats", stats}};
}

void write_experiment_histograms(const unmix::ExperimentResult& res, const std::string& dir,
                                 const std::string& prefix) {
  for (const auto& [key, hist] : res.histograms) {
    unmix::write_text_file(dir + prefix + "_hist_" + key + ".csv",
                           unmix::write_histogram_csv(hist));
  }
}

double mean_over_runs(const unmix::ExperimentResult& res, int component) {
  double acc = 0.0;
  for (const auto& run : res.runs)
    acc += component < 0 ? run.estimate.b : run.estimate.abundance[component];
  return acc / static_cast<double>(res.runs.size());
}

int cmd_reproduce(const Options& opt) {
  auto [sc, cfg] = load_effective_config(opt);
  sc.library = load_library(opt);
  if (opt.quick) {
    if (!opt.has_runs) sc.n_runs = 5;
    if (!opt.has_iters) cfg.n_iter = 2000;
    if (!opt.has_burn_in) cfg.burn_in = 500;
  }
  sc.validate();
  cfg.validate();

  fs::create_directories(opt.out_path);
  const std::string dir = opt.out_path + "/";

  unmix::ExperimentOptions run_opts;
  run_opts.jobs = opt.jobs;
  if (opt.trace) {
    fs::create_directories(dir + "traces_sdp");
    run_opts.trace_dir = dir + "traces_sdp";
  }
  const unmix::ExperimentResult sdp = unmix::run_experiment(sc, cfg, run_opts);

  run_opts.baseline = true;
  if (opt.trace) {
    fs::create_directories(dir + "traces_baseline");
    run_opts.trace_dir = dir + "traces_baseline";
  }
  const unmix::ExperimentResult base = unmix::run_experiment(sc, cfg, run_opts);

  char buf[4096];
  std::string report;
  report += "Synthetic unmixing reproduction\n";
  report += "===============================\n\n";
  std::snprintf(buf, sizeof(buf),
                "scenario: true_b = %.4g, noise_sigma = %.4g, seed = %llu\n", sc.true_b,
                sc.noise_sigma, static_cast<unsigned long long>(sc.seed));
  report += buf;
  report += "true_a = [";
  for (std::size_t r = 0; r < sc.true_abundance.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%s%.4g", r ? ", " : "", sc.true_abundance[r]);
    report += buf;
  }
  report += "]\n";
  std::snprintf(buf, sizeof(buf),
                "protocol: %d runs x %d iterations (%d burn-in), paired noise seeds\n\n",
                sc.n_runs, cfg.n_iter, cfg.burn_in);
  report += buf;

  report += "Estimation and reconstruction errors (x 10^-2)\n\n";
  report += "  algorithm                    MSE       RE\n";
  std::snprintf(buf, sizeof(buf), "  sparse-dirichlet (beta=%.2g)  %.4f    %.2f\n",
                cfg.hyper.beta, sdp.mse * 100.0, sdp.re * 100.0);
  report += buf;
  std::snprintf(buf, sizeof(buf), "  uniform (beta=1)             %.4f    %.2f\n\n",
                base.mse * 100.0, base.re * 100.0);
  report += buf;

  std::snprintf(buf, sizeof(buf), "mean estimates over runs (sparse): a1 = %.4f, b = %.4f\n",
                mean_over_runs(sdp, 0), mean_over_runs(sdp, -1));
  report += buf;
  std::snprintf(buf, sizeof(buf), "mean estimates over runs (uniform): a1 = %.4f, b = %.4f\n",
                mean_over_runs(base, 0), mean_over_runs(base, -1));
  report += buf;
  const auto& sdp_a3 = sdp.pooled_stats.at("a3");
  const auto& base_a3 = base.pooled_stats.at("a3");
  std::snprintf(buf, sizeof(buf),
                "pooled a3 posterior: mean %.5f sd %.5f (sparse) vs mean %.5f sd %.5f "
                "(uniform)\n",
                sdp_a3.mean, sdp_a3.sd, base_a3.mean, base_a3.sd);
  report += buf;

  unmix::write_text_file(dir + "report.txt", report);
  dump_json(dir + "report.json", json{{"scenario", scenario_json(sc)},
                                      {"config", config_json(cfg)},
                                      {"sdp", experiment_json(sdp)},
                                      {"baseline", experiment_json(base)}});
  write_experiment_histograms(sdp, dir, "sdp");
  write_experiment_histograms(base, dir, "baseline");
  unmix::write_text_file(dir + "library.csv", unmix::write_library(sc.library));

  std::fputs(report.c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical Bayesian hyperspectral unmixing under the polynomial "
               "post-nonlinear mixing model with a sparse Dirichlet abundance prior"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "RNG seed")->each([&](const std::string&) {
      opt.has_seed = true;
    });
  };
  auto add_sampler_overrides = [&](CLI::App* sub) {
    sub->add_option("--beta", opt.beta, "Dirichlet concentration override")
        ->each([&](const std::string&) { opt.has_beta = true; });
    sub->add_option("--iters", opt.iters, "MCMC iterations override")
        ->each([&](const std::string&) { opt.has_iters = true; });
    sub->add_option("--burn-in", opt.burn_in, "burn-in iterations override")
        ->each([&](const std::string&) { opt.has_burn_in = true; });
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic mixed pixel");
  synth->add_option("--library", opt.library_path, "endmember library CSV (default: bundled)");
  synth->add_option("--config", opt.config_path, "key=value configuration file");
  synth->add_option("--out", opt.out_path, "output pixel CSV path")->required();
  synth->add_option("--noise-sigma", opt.noise_sigma, "noise sd override")
      ->each([&](const std::string&) { opt.has_noise = true; });
  add_seed(synth);

  CLI::App* unmix_cmd = app.add_subcommand("unmix", "unmix one pixel");
  unmix_cmd->add_option("--library", opt.library_path,
                        "endmember library CSV (default: bundled)");
  unmix_cmd->add_option("--pixel", opt.pixel_path, "pixel CSV to unmix")->required();
  unmix_cmd->add_option("--config", opt.config_path, "key=value configuration file");
  unmix_cmd->add_option("--out", opt.out_path, "output directory")->required();
  unmix_cmd->add_flag("--trace", opt.trace, "also write the full chain trace CSV");
  add_seed(unmix_cmd);
  add_sampler_overrides(unmix_cmd);

  CLI::App* repro = app.add_subcommand(
      "reproduce", "run the paired sparse/uniform synthetic experiment and write a report");
  repro->add_option("--library", opt.library_path,
                    "endmember library CSV (default: bundled)");
  repro->add_option("--config", opt.config_path, "key=value configuration file");
  repro->add_option("--out", opt.out_path, "output directory")->required();
  repro->add_flag("--quick", opt.quick, "scaled-down protocol: 5 runs x 2000 iterations");
  repro->add_flag("--trace", opt.trace, "write per-run chain traces");
  repro->add_option("--jobs", opt.jobs, "max parallel runs (default: all cores)");
  repro->add_option("--runs", opt.runs, "number of runs override")
      ->each([&](const std::string&) { opt.has_runs = true; });
  repro->add_option("--noise-sigma", opt.noise_sigma, "noise sd override")
      ->each([&](const std::string&) { opt.has_noise = true; });
  add_seed(repro);
  add_sampler_overrides(repro);

  CLI::App* validate = app.add_subcommand("validate-library", "parse and check a library CSV");
  validate->add_option("library", opt.library_path, "endmember library CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(opt);
    if (unmix_cmd->parsed()) return cmd_unmix(opt);
    if (repro->parsed()) return cmd_reproduce(opt);
    if (validate->parsed()) return cmd_validate_library(opt);
    return kExitUsage;
  } catch (const unmix::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const unmix::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
