#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hbpk/distributions.hpp"
#include "hbpk/likelihood.hpp"
#include "hbpk/pkmodel.hpp"
#include "hbpk/rng.hpp"

namespace hbpk {

inline const std::vector<double> kSparseSchedule{0.0, 1.0};
inline const std::vector<double> kRichSchedule{0.0, 1.0, 2.0, 5.0, 11.0, 23.0, 47.0};

/// Data-generating population: median clearance 2 L/h.
PopulationParams true_population();

/// NIG(log 5, 1, 10, 2.7) prior over the population parameters.
NIGParams default_prior();

struct ScenarioConfig {
  std::string name;
  std::size_t n_individuals = 20;
  std::vector<double> schedule = kSparseSchedule;
  PopulationParams zeta_true = true_population();
  PkConstants pk;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Simulated individuals. `latent` holds the true log-clearances and is for
/// evaluation only; inference sees `observations`.
struct Population {
  std::vector<IndividualParams> latent;
  std::vector<ObservationSet> observations;

  [[nodiscard]] std::size_t size() const { return observations.size(); }
  [[nodiscard]] Dataset dataset(const PkConstants& pk) const;
};

/// theta_i ~ N(zeta_true), y_ij ~ LogNormal(log C(t_ij, theta_i), sigma^2).
/// Individual i draws from rng.child(i).
Population generate_population(const ScenarioConfig& cfg, const RngStream& rng);
/// Uses RngStream(cfg.seed).
Population generate_population(const ScenarioConfig& cfg);

/// N20-sparse, N20-rich, N100-sparse, N100-rich with per-scenario seeds
/// derived from base_seed.
std::vector<ScenarioConfig> four_scenarios(std::uint64_t base_seed);

/// Lookup by name in four_scenarios(base_seed); throws ConfigError.
ScenarioConfig scenario_by_name(std::string_view name, std::uint64_t base_seed);

}  // namespace hbpk
