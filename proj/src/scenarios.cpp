#include "hbpk/scenarios.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "hbpk/errors.hpp"

namespace hbpk {

PopulationParams true_population() { return {std::log(2.0), 0.1}; }

NIGParams default_prior() { return {std::log(5.0), 1.0, 10.0, 2.7}; }

void ScenarioConfig::validate() const {
  if (n_individuals < 1) throw ConfigError("scenario: n_individuals must be >= 1");
  if (schedule.empty()) throw ConfigError("scenario: empty sampling schedule");
  for (std::size_t j = 0; j < schedule.size(); ++j) {
    if (!(schedule[j] >= 0.0) || (j > 0 && !(schedule[j] > schedule[j - 1]))) {
      throw ConfigError("scenario: schedule must be sorted, non-negative, distinct");
    }
  }
  if (!(zeta_true.omega2_cl > 0.0)) throw ConfigError("scenario: omega2 must be > 0");
  pk.validate();
}

Dataset Population::dataset(const PkConstants& pk) const {
  Dataset data;
  data.reserve(observations.size());
  for (const auto& obs : observations) {
    data.push_back(std::make_shared<PkLikelihood>(pk, obs));
  }
  return data;
}

Population generate_population(const ScenarioConfig& cfg, const RngStream& rng) {
  cfg.validate();
  Population pop;
  pop.latent.reserve(cfg.n_individuals);
  pop.observations.reserve(cfg.n_individuals);
  const double omega = std::sqrt(cfg.zeta_true.omega2_cl);
  for (std::size_t i = 0; i < cfg.n_individuals; ++i) {
    Engine eng = rng.child(static_cast<std::uint64_t>(i)).engine();
    std::normal_distribution<double> z;
    const IndividualParams p{cfg.zeta_true.mu_cl + omega * z(eng)};
    ObservationSet obs;
    obs.times = cfg.schedule;
    obs.values.reserve(cfg.schedule.size());
    for (double t : cfg.schedule) {
      obs.values.push_back(
          std::exp(log_concentration(cfg.pk, p, t) + cfg.pk.sigma * z(eng)));
    }
    pop.latent.push_back(p);
    pop.observations.push_back(std::move(obs));
  }
  return pop;
}

Population generate_population(const ScenarioConfig& cfg) {
  return generate_population(cfg, RngStream(cfg.seed));
}

std::vector<ScenarioConfig> four_scenarios(std::uint64_t base_seed) {
  const RngStream root(base_seed);
  std::vector<ScenarioConfig> out;
  for (std::size_t n : {20, 100}) {
    for (bool rich : {false, true}) {
      ScenarioConfig c;
      c.name = "N" + std::to_string(n) + (rich ? "-rich" : "-sparse");
      c.n_individuals = n;
      c.schedule = rich ? kRichSchedule : kSparseSchedule;
      c.seed = root.child(c.name).key();
      out.push_back(std::move(c));
    }
  }
  return out;
}

ScenarioConfig scenario_by_name(std::string_view name, std::uint64_t base_seed) {
  for (auto& c : four_scenarios(base_seed)) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected N20-sparse, N20-rich, N100-sparse or N100-rich)");
}

}  // namespace hbpk
