#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hbpk/distributions.hpp"
#include "hbpk/ensemble.hpp"
#include "hbpk/likelihood.hpp"
#include "hbpk/rng.hpp"

namespace hbpk {

enum class Algorithm { pmmh, npf, sinpf, mwg };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);  // throws ConfigError
inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::pmmh, Algorithm::npf,
                                               Algorithm::sinpf, Algorithm::mwg};

/// Pseudo-marginal MH settings.
struct McmcConfig {
  std::size_t chain_length = 10000;
  double burn_in_fraction = 0.1;
  std::size_t mc_samples = 25;
  /// Random-walk proposal SD per coordinate; sqrt(0.2) is a variance of 0.2.
  PopulationParams proposal_sd{0.4472135954999579, 0.4472135954999579};
  /// Defaults to the prior mean.
  std::optional<PopulationParams> initial;

  void validate() const;
  [[nodiscard]] std::size_t burn_in() const;
};

/// Nested particle filter settings (both variants).
struct PfConfig {
  std::size_t outer_size = 1000;
  std::size_t inner_size = 1000;
  double ess_threshold_fraction = 0.5;
  /// Outer rejuvenation after resampling; off when unset.
  std::optional<PopulationParams> rejuvenation_sd;

  void validate() const;
};

/// Parametric approximation + Metropolis-within-Gibbs settings.
struct MwgConfig {
  std::size_t chain_length = 10000;
  double burn_in_fraction = 0.1;
  std::size_t inner_size = 1000;
  /// Proposal jitter SD = max(fraction * |theta*|, floor).
  double rejuvenation_fraction = 0.001;
  double rejuvenation_floor = 1e-8;
  /// Weight the inner ensemble one observation at a time, resampling and
  /// rejuvenating when its ESS drops below the threshold.
  bool inner_sequential = false;
  double inner_ess_threshold_fraction = 0.5;

  void validate() const;
  [[nodiscard]] std::size_t burn_in() const;
};

struct AlgorithmConfig {
  McmcConfig mcmc;
  PfConfig pf;
  MwgConfig mwg;

  /// Published settings: L = 1e4 (10% burn-in), M = 25, R = S = 1000.
  static AlgorithmConfig paper();
  /// R, S and L scaled down 5x; M unchanged.
  static AlgorithmConfig reduced();
};

struct Diagnostics {
  double acceptance_rate = 0.0;  // pmmh, mwg (mean over individuals)
  std::size_t resample_count = 0;  // particle filters
  std::vector<double> individual_seconds;  // sequential algorithms
  double wall_seconds = 0.0;
};

using McmcSamples = std::vector<PopulationParams>;
using Posterior = std::variant<McmcSamples, OuterEnsemble, NIGParams>;

enum class ResultKind { mcmc_samples, weighted_ensemble, parametric };
std::string_view to_string(ResultKind k);

/// Common output of all four algorithms.
struct InferenceResult {
  Algorithm algorithm = Algorithm::pmmh;
  Posterior posterior;
  Diagnostics diagnostics;

  [[nodiscard]] ResultKind kind() const {
    return static_cast<ResultKind>(posterior.index());
  }
};

/// Log of (1/M) sum_m p(y | theta_m) N(theta_m; zeta) / N(theta_m; zeta_src),
/// with theta_m drawn from N(zeta_src). The ratio is exactly one when
/// zeta == zeta_src. Returns -inf if every summand underflows.
double marginal_likelihood_mc(const PopulationParams& zeta,
                              const IndividualLikelihood& y,
                              std::span<const double> thetas,
                              const PopulationParams& zeta_src);

/// Pseudo-marginal Metropolis-Hastings with importance sampling (batch).
InferenceResult pm_mh_is(const Dataset& data, const NIGParams& prior,
                         const McmcConfig& cfg, const RngStream& rng);

struct OuterUpdate {
  OuterEnsemble ensemble;
  bool resampled = false;
  double ess = 0.0;  // before resampling
  /// Per input particle: log of the likelihood estimate that multiplied its
  /// weight, i.e. log sum_s w(s) over its (possibly shared) inner ensemble.
  std::vector<double> log_increments;
};

/// One nested particle filter step: a fresh inner ensemble per outer particle.
OuterUpdate npf_update(const OuterEnsemble& outer, const IndividualLikelihood& y,
                       const PfConfig& cfg, const RngStream& rng);

/// One single-inner nested particle filter step: one inner ensemble drawn at
/// the weighted median, reweighted per outer particle by importance ratios.
OuterUpdate sinpf_update(const OuterEnsemble& outer,
                         const IndividualLikelihood& y, const PfConfig& cfg,
                         const RngStream& rng);

struct MwgUpdate {
  NIGParams posterior;
  double acceptance_rate = 0.0;
  McmcSamples chain;  // post burn-in population draws
};

/// One parametric-approximation + Metropolis-within-Gibbs step.
MwgUpdate mwg_update(const NIGParams& h, const IndividualLikelihood& y,
                     const MwgConfig& cfg, const RngStream& rng);

/// Gibbs direct step: zeta ~ p(zeta | theta) under NIG(h).
PopulationParams mwg_direct_draw(const NIGParams& h, double theta, Engine& rng);

/// Log acceptance ratio of the independence proposal theta_new against
/// theta_old; the observation model cancels out.
double mwg_log_acceptance(double theta_new, double theta_old,
                          const PopulationParams& zeta,
                          const PopulationParams& zeta_ref);

/// Sequential fold of per-individual updates.
///
/// Randomness for individual k is drawn from rng.child(k), so a run can be
/// split across several `process` calls and reproduce the single-call
/// result exactly.
class SequentialRun {
 public:
  SequentialRun(Algorithm algorithm, const NIGParams& prior,
                AlgorithmConfig cfg, const RngStream& rng);

  void process(const IndividualLikelihood& y);
  void process(const Dataset& data);

  [[nodiscard]] std::size_t processed() const { return processed_; }
  [[nodiscard]] InferenceResult result() const;

 private:
  Algorithm algorithm_;
  AlgorithmConfig cfg_;
  RngStream rng_;
  std::variant<OuterEnsemble, NIGParams> state_;
  std::size_t processed_ = 0;
  Diagnostics diag_;
  double acceptance_sum_ = 0.0;
};

InferenceResult run_sequential(Algorithm algorithm, const Dataset& data,
                               const NIGParams& prior,
                               const AlgorithmConfig& cfg, const RngStream& rng);

/// Dispatches to pm_mh_is or run_sequential, recording wall time.
InferenceResult run_inference(Algorithm algorithm, const Dataset& data,
                              const NIGParams& prior,
                              const AlgorithmConfig& cfg, std::uint64_t seed);

}  // namespace hbpk
