#include "unmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "unmix/errors.hpp"

namespace unmix {

namespace {

constexpr double kMinStep = 1e-6;
constexpr double kMaxStep = 2.0;
constexpr double kSigma2Floor = 1e-300;  // underflow guard, reachable only with noiseless data

GaussianParams b_conditional_from_mix(const std::vector<double>& y,
                                      const std::vector<double>& mix, double sigma2,
                                      double sigma_b2) {
  if (!(sigma2 > 0.0) || !(sigma_b2 > 0.0))
    throw std::domain_error("sigma2 and sigma_b2 must be > 0");
  double rh = 0.0;  // (y - Ma)' h
  double hh = 0.0;  // h' h
  for (std::size_t l = 0; l < y.size(); ++l) {
    const double h = mix[l] * mix[l];
    rh += (y[l] - mix[l]) * h;
    hh += h * h;
  }
  const double denom = sigma_b2 * hh + sigma2;
  return {sigma_b2 * rh / denom, sigma_b2 * sigma2 / denom};
}

double sigma2_scale_from_mix(const std::vector<double>& y, const std::vector<double>& mix,
                             double b) {
  return 0.5 * sum_squared_residual(y, apply_post_nonlinearity(mix, b));
}

double log_target_from_mix(const std::vector<double>& y, const std::vector<double>& mix,
                           const AbundanceVector& a, double b, double sigma2, double beta,
                           bool prior_only) {
  double t = 0.0;
  if (!prior_only) {
    t -= sum_squared_residual(y, apply_post_nonlinearity(mix, b)) / (2.0 * sigma2);
  }
  double sum_log = 0.0;
  for (double v : a) sum_log += std::log(v);
  return t + (beta - 1.0) * sum_log;
}

struct StepOutcome {
  AbundanceVector abundance;
  std::vector<double> mix;
  bool accepted = false;
  double accept_prob = 0.0;
};

StepOutcome metropolis_from_mix(RngState& rng, const std::vector<double>& y,
                                const EndmemberLibrary& lib, const ModelParams& cur,
                                const std::vector<double>& cur_mix, double beta, double step,
                                bool prior_only) {
  const int R = lib.endmembers();
  AbundanceVector prop = cur.abundance;
  double head = 0.0;
  for (int r = 0; r < R - 1; ++r) {
    prop[r] = cur.abundance[r] + step * rng.normal(0.0, 1.0);
    head += prop[r];
  }
  prop[R - 1] = 1.0 - head;
  for (int r = 0; r < R; ++r) {
    if (prop[r] < kAbundanceFloor) return {cur.abundance, cur_mix, false, 0.0};
  }
  std::vector<double> prop_mix = mix_linear(lib, prop);
  const double delta =
      log_target_from_mix(y, prop_mix, prop, cur.b, cur.sigma2, beta, prior_only) -
      log_target_from_mix(y, cur_mix, cur.abundance, cur.b, cur.sigma2, beta, prior_only);
  const double alpha = std::min(1.0, std::exp(delta));
  if (rng.uniform() < alpha) return {std::move(prop), std::move(prop_mix), true, alpha};
  return {cur.abundance, cur_mix, false, alpha};
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_iter < 1) throw ValidationError("n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter)
    throw ValidationError("burn_in must satisfy 0 <= burn_in < n_iter");
  if (!(proposal_step > 0.0)) throw ValidationError("proposal_step must be > 0");
  if (!(target_accept > 0.0) || !(target_accept < 1.0))
    throw ValidationError("target_accept must be in (0, 1)");
  hyper.validate();
}

GaussianParams b_conditional_params(const PixelObservation& y, const EndmemberLibrary& lib,
                                    const AbundanceVector& a, double sigma2, double sigma_b2) {
  return b_conditional_from_mix(y.reflectance, mix_linear(lib, a), sigma2, sigma_b2);
}

double sample_b_conditional(RngState& rng, const PixelObservation& y,
                            const EndmemberLibrary& lib, const AbundanceVector& a,
                            double sigma2, double sigma_b2) {
  const GaussianParams p = b_conditional_params(y, lib, a, sigma2, sigma_b2);
  return rng.normal(p.mean, p.variance);
}

double sample_sigma2_conditional(RngState& rng, const PixelObservation& y,
                                 const EndmemberLibrary& lib, const AbundanceVector& a,
                                 double b) {
  const double scale = sigma2_scale_from_mix(y.reflectance, mix_linear(lib, a), b);
  if (scale == 0.0)
    throw std::domain_error(
        "zero residual: sigma2 conditional is degenerate; perturb the data or parameters");
  const double L = static_cast<double>(y.bands());
  return std::max(rng.inverse_gamma(0.5 * L, scale), kSigma2Floor);
}

double sample_sigma_b2_conditional(RngState& rng, double b, const PriorHyperparams& hyper) {
  hyper.validate();
  return rng.inverse_gamma(0.5 + hyper.gamma, 0.5 * b * b + hyper.nu);
}

double abundance_log_target(const PixelObservation& y, const EndmemberLibrary& lib,
                            const AbundanceVector& a, double b, double sigma2, double beta,
                            bool prior_only) {
  return log_target_from_mix(y.reflectance, mix_linear(lib, a), a, b, sigma2, beta,
                             prior_only);
}

AbundanceStep metropolis_step_abundance(RngState& rng, const PixelObservation& y,
                                        const EndmemberLibrary& lib, const ModelParams& params,
                                        const PriorHyperparams& hyper, double step,
                                        bool prior_only) {
  StepOutcome out = metropolis_from_mix(rng, y.reflectance, lib, params,
                                        mix_linear(lib, params.abundance), hyper.beta, step,
                                        prior_only);
  return {std::move(out.abundance), out.accepted, out.accept_prob};
}

Chain run_chain(const PixelObservation& y, const EndmemberLibrary& lib,
                const SamplerConfig& config) {
  config.validate();
  lib.validate();
  const int L = lib.bands();
  const int R = lib.endmembers();
  if (y.bands() != L)
    throw std::invalid_argument("pixel has " + std::to_string(y.bands()) +
                                " bands but library has " + std::to_string(L));
  for (double v : y.reflectance)
    if (!std::isfinite(v)) throw ValidationError("pixel contains a non-finite value");

  RngState rng(config.seed);
  ModelParams state;
  state.abundance.assign(static_cast<std::size_t>(R), 1.0 / R);
  state.b = 0.0;
  std::vector<double> mix = mix_linear(lib, state.abundance);
  state.sigma2 = config.prior_only
                     ? 1.0
                     : std::max(sum_squared_residual(y.reflectance, mix) / L, 1e-12);
  state.sigma_b2 = 1.0;

  double log_step = std::log(config.proposal_step);
  double step = config.proposal_step;

  Chain chain;
  chain.samples.reserve(static_cast<std::size_t>(config.n_iter));

  for (int t = 0; t < config.n_iter; ++t) {
    try {
      StepOutcome move = metropolis_from_mix(rng, y.reflectance, lib, state, mix,
                                             config.hyper.beta, step, config.prior_only);
      ++chain.proposal_count_a;
      if (move.accepted) {
        ++chain.accept_count_a;
        state.abundance = std::move(move.abundance);
        mix = std::move(move.mix);
      }

      // Robbins-Monro step tuning, burn-in only; frozen afterwards.
      // Gain decays as k^-0.6 so the step can still travel late in burn-in.
      if (config.adapt && t < config.burn_in) {
        log_step += (move.accept_prob - config.target_accept) / std::pow(t + 1.0, 0.6);
        log_step = std::clamp(log_step, std::log(kMinStep), std::log(kMaxStep));
        step = std::exp(log_step);
      }

      if (!config.prior_only) {
        const GaussianParams bp =
            b_conditional_from_mix(y.reflectance, mix, state.sigma2, state.sigma_b2);
        state.b = rng.normal(bp.mean, bp.variance);

        const double scale = sigma2_scale_from_mix(y.reflectance, mix, state.b);
        if (scale == 0.0)
          throw std::domain_error("zero residual: sigma2 conditional is degenerate");
        state.sigma2 = std::max(rng.inverse_gamma(0.5 * L, scale), kSigma2Floor);
      }
      state.sigma_b2 = rng.inverse_gamma(0.5 + config.hyper.gamma,
                                         0.5 * state.b * state.b + config.hyper.nu);
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(t) + ": " + e.what());
    }
    chain.samples.push_back(state);
  }
  chain.final_step = step;
  return chain;
}

ModelParams posterior_mean(const Chain& chain, int burn_in) {
  const int n = static_cast<int>(chain.samples.size());
  if (burn_in < 0 || burn_in >= n)
    throw std::invalid_argument("burn_in leaves no post-burn-in samples");
  const int kept = n - burn_in;
  const std::size_t R = chain.samples.front().abundance.size();

  ModelParams mean;
  mean.abundance.assign(R, 0.0);
  mean.b = mean.sigma2 = mean.sigma_b2 = 0.0;
  for (int t = burn_in; t < n; ++t) {
    const ModelParams& s = chain.samples[t];
    for (std::size_t r = 0; r < R; ++r) mean.abundance[r] += s.abundance[r];
    mean.b += s.b;
    mean.sigma2 += s.sigma2;
    mean.sigma_b2 += s.sigma_b2;
  }
  double sum = 0.0;
  for (double& v : mean.abundance) {
    v /= kept;
    sum += v;
  }
  for (double& v : mean.abundance) v /= sum;  // renormalize away float drift
  mean.b /= kept;
  mean.sigma2 /= kept;
  mean.sigma_b2 /= kept;
  return mean;
}

Histogram posterior_histogram(const Chain& chain, ComponentRef component, int burn_in,
                              int bins) {
  const int n = static_cast<int>(chain.samples.size());
  if (burn_in < 0 || burn_in >= n)
    throw std::invalid_argument("burn_in leaves no post-burn-in samples");
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");

  const std::size_t R = chain.samples.front().abundance.size();
  if (component.kind == ComponentRef::Kind::abundance &&
      (component.index < 0 || component.index >= static_cast<int>(R)))
    throw std::invalid_argument("abundance index " + std::to_string(component.index) +
                                " out of range");

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n - burn_in));
  for (int t = burn_in; t < n; ++t) {
    const ModelParams& s = chain.samples[t];
    switch (component.kind) {
      case ComponentRef::Kind::abundance:
        values.push_back(s.abundance[component.index]);
        break;
      case ComponentRef::Kind::b:
        values.push_back(s.b);
        break;
      case ComponentRef::Kind::sigma2:
        values.push_back(s.sigma2);
        break;
      case ComponentRef::Kind::sigma_b2:
        values.push_back(s.sigma_b2);
        break;
    }
  }
  if (component.kind == ComponentRef::Kind::abundance)
    return make_histogram(values, 0.0, 1.0, bins);
  return make_histogram(values, bins);
}

}  // namespace unmix
