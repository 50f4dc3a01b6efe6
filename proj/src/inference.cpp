#include "hbpk/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hbpk/errors.hpp"
#include "kernels.hpp"

namespace hbpk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t burn_in_count(std::size_t length, double fraction) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(length)));
}

/// Ends an outer update: ESS check, then multinomial resampling and optional
/// rejuvenation when the ESS fell below threshold.
OuterUpdate finish_outer_update(std::vector<PopulationParams> particles,
                                std::vector<double> weights, const PfConfig& cfg,
                                const RngStream& rng) {
  OuterUpdate out;
  out.ess = effective_sample_size(weights);
  out.ensemble = {std::move(particles), std::move(weights)};
  const double threshold =
      cfg.ess_threshold_fraction * static_cast<double>(out.ensemble.size());
  if (out.ess >= threshold) return out;

  Engine eng = rng.child("resample").engine();
  out.ensemble = resample(out.ensemble, eng);
  if (cfg.rejuvenation_sd) {
    out.ensemble = rejuvenate(std::move(out.ensemble), *cfg.rejuvenation_sd, eng);
  }
  out.resampled = true;
  return out;
}

void require_normalized(const OuterEnsemble& outer) {
  if (outer.size() == 0 || outer.weights.size() != outer.size()) {
    throw ConfigError("outer ensemble is empty or has mismatched weights");
  }
}

std::vector<double> draw_normal(const PopulationParams& zeta, std::size_t n,
                                Engine& eng) {
  std::normal_distribution<double> z;
  const double sd = std::sqrt(zeta.omega2_cl);
  std::vector<double> out(n);
  for (double& t : out) t = zeta.mu_cl + sd * z(eng);
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::pmmh: return "pmmh";
    case Algorithm::npf: return "npf";
    case Algorithm::sinpf: return "sinpf";
    case Algorithm::mwg: return "mwg";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected pmmh, npf, sinpf or mwg)");
}

std::string_view to_string(ResultKind k) {
  switch (k) {
    case ResultKind::mcmc_samples: return "mcmc-samples";
    case ResultKind::weighted_ensemble: return "weighted-ensemble";
    case ResultKind::parametric: return "parametric";
  }
  return "?";
}

void McmcConfig::validate() const {
  if (chain_length < 10) throw ConfigError("McmcConfig: chain_length must be >= 10");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ConfigError("McmcConfig: burn_in_fraction must lie in [0, 1)");
  }
  if (mc_samples < 1) throw ConfigError("McmcConfig: mc_samples must be >= 1");
  if (!(proposal_sd.mu_cl > 0.0) || !(proposal_sd.omega2_cl > 0.0)) {
    throw ConfigError("McmcConfig: proposal_sd must be > 0");
  }
  if (initial && !(initial->omega2_cl > 0.0)) {
    throw ConfigError("McmcConfig: initial omega2 must be > 0");
  }
}

std::size_t McmcConfig::burn_in() const {
  return burn_in_count(chain_length, burn_in_fraction);
}

void PfConfig::validate() const {
  if (outer_size < 1) throw ConfigError("PfConfig: outer_size must be >= 1");
  if (inner_size < 2) throw ConfigError("PfConfig: inner_size must be >= 2");
  if (!(ess_threshold_fraction > 0.0 && ess_threshold_fraction <= 1.0)) {
    throw ConfigError("PfConfig: ess_threshold_fraction must lie in (0, 1]");
  }
  if (rejuvenation_sd &&
      (rejuvenation_sd->mu_cl < 0.0 || rejuvenation_sd->omega2_cl < 0.0)) {
    throw ConfigError("PfConfig: rejuvenation_sd must be >= 0");
  }
}

void MwgConfig::validate() const {
  if (chain_length < 10) throw ConfigError("MwgConfig: chain_length must be >= 10");
  if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0)) {
    throw ConfigError("MwgConfig: burn_in_fraction must lie in [0, 1)");
  }
  if (chain_length - burn_in() < 4) {
    throw ConfigError("MwgConfig: fewer than 4 post burn-in samples");
  }
  if (inner_size < 1) throw ConfigError("MwgConfig: inner_size must be >= 1");
  if (!(rejuvenation_fraction >= 0.0) || !(rejuvenation_floor >= 0.0)) {
    throw ConfigError("MwgConfig: rejuvenation settings must be >= 0");
  }
  if (!(inner_ess_threshold_fraction > 0.0 && inner_ess_threshold_fraction <= 1.0)) {
    throw ConfigError("MwgConfig: inner_ess_threshold_fraction must lie in (0, 1]");
  }
}

std::size_t MwgConfig::burn_in() const {
  return burn_in_count(chain_length, burn_in_fraction);
}

AlgorithmConfig AlgorithmConfig::paper() { return {}; }

AlgorithmConfig AlgorithmConfig::reduced() {
  AlgorithmConfig c;
  c.mcmc.chain_length = 2000;
  c.pf.outer_size = 200;
  c.pf.inner_size = 200;
  c.mwg.chain_length = 2000;
  c.mwg.inner_size = 200;
  return c;
}

double marginal_likelihood_mc(const PopulationParams& zeta,
                              const IndividualLikelihood& y,
                              std::span<const double> thetas,
                              const PopulationParams& zeta_src) {
  if (thetas.empty()) throw ConfigError("marginal_likelihood_mc: no samples");
  if (!(zeta.omega2_cl > 0.0) || !(zeta_src.omega2_cl > 0.0)) {
    throw ConfigError("marginal_likelihood_mc: omega2 must be > 0");
  }
  std::vector<double> terms(thetas.size());
  y.log_likelihood(thetas, terms);
  if (!(zeta == zeta_src)) {
    for (std::size_t m = 0; m < thetas.size(); ++m) {
      terms[m] += iiv_log_pdf(thetas[m], zeta) - iiv_log_pdf(thetas[m], zeta_src);
    }
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(thetas.size()));
}

InferenceResult pm_mh_is(const Dataset& data, const NIGParams& prior,
                         const McmcConfig& cfg, const RngStream& rng) {
  cfg.validate();
  prior.validate();
  if (data.empty()) throw ConfigError("pm_mh_is: no individuals");

  Engine eng = rng.engine();
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif;

  const std::size_t m_count = cfg.mc_samples;
  const double log_m = std::log(static_cast<double>(m_count));
  PopulationParams current = cfg.initial.value_or(prior.mean());
  double current_log_prior = nig_log_pdf(prior, current);

  std::vector<double> thetas(m_count), log_ratio(m_count), ll(m_count),
      weighted(m_count);
  McmcSamples samples;
  samples.reserve(cfg.chain_length - cfg.burn_in());
  std::size_t accepted = 0;

  for (std::size_t l = 0; l < cfg.chain_length; ++l) {
    const PopulationParams proposal{
        current.mu_cl + cfg.proposal_sd.mu_cl * z(eng),
        current.omega2_cl + cfg.proposal_sd.omega2_cl * z(eng)};

    // Zero prior density outside omega2 > 0: reject without evaluating.
    if (proposal.omega2_cl > 0.0) {
      const double proposal_log_prior = nig_log_pdf(prior, proposal);
      const double sd = std::sqrt(proposal.omega2_cl);
      for (std::size_t m = 0; m < m_count; ++m) {
        thetas[m] = proposal.mu_cl + sd * z(eng);
        log_ratio[m] =
            iiv_log_pdf(thetas[m], current) - iiv_log_pdf(thetas[m], proposal);
      }
      double log_num = 0.0, log_den = 0.0;
      for (const auto& y : data) {
        y->log_likelihood(thetas, ll);
        for (std::size_t m = 0; m < m_count; ++m) weighted[m] = ll[m] + log_ratio[m];
        log_num += log_sum_exp(ll) - log_m;
        log_den += log_sum_exp(weighted) - log_m;
      }
      const double log_alpha =
          log_num - log_den + proposal_log_prior - current_log_prior;
      // NaN (both estimates underflowed) compares false: rejected.
      if (std::log(unif(eng)) < log_alpha) {
        current = proposal;
        current_log_prior = proposal_log_prior;
        ++accepted;
      }
    }
    if (l >= cfg.burn_in()) samples.push_back(current);
  }

  if (accepted == 0) {
    throw DegeneracyError(
        "pm_mh_is: no proposal accepted over the whole chain (mis-scaled "
        "proposal or likelihood underflow)");
  }
  InferenceResult result;
  result.algorithm = Algorithm::pmmh;
  result.posterior = std::move(samples);
  result.diagnostics.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(cfg.chain_length);
  return result;
}

OuterUpdate npf_update(const OuterEnsemble& outer, const IndividualLikelihood& y,
                       const PfConfig& cfg, const RngStream& rng) {
  cfg.validate();
  require_normalized(outer);
  const std::size_t r_count = outer.size();
  const std::size_t s_count = cfg.inner_size;

  Engine eng = rng.child("inner").engine();
  std::normal_distribution<double> z;
  std::vector<double> thetas(s_count), ll(s_count), log_inc(r_count), log_v(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    const PopulationParams& zeta = outer.particles[r];
    const double sd = std::sqrt(zeta.omega2_cl);
    for (double& t : thetas) t = zeta.mu_cl + sd * z(eng);
    y.log_likelihood(thetas, ll);
    log_inc[r] = log_sum_exp(ll);
    log_v[r] = outer.weights[r] > 0.0 ? std::log(outer.weights[r]) + log_inc[r] : kNegInf;
  }
  OuterUpdate out =
      finish_outer_update(outer.particles, normalize_log_weights(log_v), cfg, rng);
  out.log_increments = std::move(log_inc);
  return out;
}

OuterUpdate sinpf_update(const OuterEnsemble& outer,
                         const IndividualLikelihood& y, const PfConfig& cfg,
                         const RngStream& rng) {
  cfg.validate();
  require_normalized(outer);
  const PopulationParams ref = weighted_median(outer);
  if (!(ref.omega2_cl > 0.0)) {
    throw DegeneracyError("sinpf_update: reference particle has omega2 <= 0");
  }
  const std::size_t r_count = outer.size();
  const std::size_t s_count = cfg.inner_size;

  Engine eng = rng.child("inner").engine();
  const std::vector<double> thetas = draw_normal(ref, s_count, eng);
  std::vector<double> ll(s_count);
  y.log_likelihood(thetas, ll);
  // Particles equal to the reference have importance ratio one.
  const double ref_increment = log_sum_exp(ll);
  if (!std::isfinite(ref_increment)) {
    throw DegeneracyError("sinpf_update: every inner weight underflowed");
  }

  // base_s = log w_ref(s) - log N(theta_s; ref); the increment of particle r
  // is log sum_s exp(base_s + log N(theta_s; zeta_r)).
  std::vector<double> base(s_count);
  double base_max = kNegInf;
  for (std::size_t s = 0; s < s_count; ++s) {
    // Floor keeps the vectorized kernels away from infinities.
    base[s] = std::max(ll[s] - iiv_log_pdf(thetas[s], ref), -1e300);
    base_max = std::max(base_max, base[s]);
  }
  // Single-precision copies, centred on the reference so that float
  // rounding of theta is relative to the spread rather than the location.
  std::vector<float> base_f(s_count), theta_f(s_count);
  for (std::size_t s = 0; s < s_count; ++s) {
    base_f[s] = static_cast<float>(std::max(base[s] - base_max, -1e30));
    theta_f[s] = static_cast<float>(thetas[s] - ref.mu_cl);
  }

  std::vector<double> log_inc(r_count), log_v(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    const PopulationParams& zeta = outer.particles[r];
    if (zeta == ref) {
      log_inc[r] = ref_increment;
    } else {
      const double inv_two_var = 0.5 / zeta.omega2_cl;
      // log N(theta; mu, w) = norm - (theta - mu)^2 / (2 w); norm added last.
      const double norm = -0.5 * std::log(2.0 * std::numbers::pi * zeta.omega2_cl);
      const double sum = detail::sum_exp_quadratic_f32(
          base_f.data(), theta_f.data(), s_count,
          static_cast<float>(zeta.mu_cl - ref.mu_cl), static_cast<float>(inv_two_var));
      if (sum > 1e-30) {
        log_inc[r] = base_max + std::log(sum) + norm;
      } else {
        // Every summand is far below the bound; redo it exactly in double.
        log_inc[r] = detail::log_sum_exp_quadratic(base.data(), thetas.data(), s_count,
                                                   zeta.mu_cl, inv_two_var) +
                     norm;
      }
    }
    log_v[r] = outer.weights[r] > 0.0 ? std::log(outer.weights[r]) + log_inc[r] : kNegInf;
  }
  OuterUpdate out =
      finish_outer_update(outer.particles, normalize_log_weights(log_v), cfg, rng);
  out.log_increments = std::move(log_inc);
  return out;
}

PopulationParams mwg_direct_draw(const NIGParams& h, double theta, Engine& rng) {
  return nig_sample(nig_conjugate_update(h, IndividualParams{theta}), rng);
}

double mwg_log_acceptance(double theta_new, double theta_old,
                          const PopulationParams& zeta,
                          const PopulationParams& zeta_ref) {
  // Grouped so that zeta == zeta_ref gives exactly zero.
  return (iiv_log_pdf(theta_new, zeta) - iiv_log_pdf(theta_new, zeta_ref)) +
         (iiv_log_pdf(theta_old, zeta_ref) - iiv_log_pdf(theta_old, zeta));
}

MwgUpdate mwg_update(const NIGParams& h, const IndividualLikelihood& y,
                     const MwgConfig& cfg, const RngStream& rng) {
  cfg.validate();
  h.validate();
  const PopulationParams ref = h.mean();
  const std::size_t s_count = cfg.inner_size;
  auto jitter_sd = [&](double theta) {
    return std::max(cfg.rejuvenation_fraction * std::abs(theta), cfg.rejuvenation_floor);
  };

  Engine eng = rng.child("inner").engine();
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif;

  std::vector<double> thetas = draw_normal(ref, s_count, eng);
  std::vector<double> weights;
  if (!cfg.inner_sequential) {
    std::vector<double> ll(s_count);
    y.log_likelihood(thetas, ll);
    weights = normalize_log_weights(ll);
  } else {
    std::vector<double> logw(s_count, 0.0);
    const double threshold = cfg.inner_ess_threshold_fraction * static_cast<double>(s_count);
    for (std::size_t j = 0; j < y.num_observations(); ++j) {
      for (std::size_t s = 0; s < s_count; ++s) logw[s] += y.log_likelihood_at(thetas[s], j);
      weights = normalize_log_weights(logw);
      if (j + 1 < y.num_observations() && effective_sample_size(weights) < threshold) {
        const auto idx = multinomial_indices(weights, s_count, eng);
        std::vector<double> next(s_count);
        for (std::size_t s = 0; s < s_count; ++s) {
          next[s] = thetas[idx[s]] + jitter_sd(thetas[idx[s]]) * z(eng);
        }
        thetas = std::move(next);
        std::fill(logw.begin(), logw.end(), 0.0);
      }
    }
  }
  const CategoricalSampler propose(weights);

  double theta_old = thetas[propose(eng)];
  McmcSamples chain;
  chain.reserve(cfg.chain_length - cfg.burn_in());
  std::size_t accepted = 0;
  for (std::size_t l = 0; l < cfg.chain_length; ++l) {
    const PopulationParams zeta = mwg_direct_draw(h, theta_old, eng);
    double theta_new = thetas[propose(eng)];
    theta_new += jitter_sd(theta_new) * z(eng);
    if (std::log(unif(eng)) < mwg_log_acceptance(theta_new, theta_old, zeta, ref)) {
      theta_old = theta_new;
      ++accepted;
    }
    if (l >= cfg.burn_in()) chain.push_back(zeta);
  }

  MwgUpdate out;
  out.posterior = nig_fit_moments(chain);
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.chain_length);
  out.chain = std::move(chain);
  return out;
}

}  // namespace hbpk
