#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hbpk/errors.hpp"
#include "hbpk/scenarios.hpp"
#include "support.hpp"

using namespace hbpk;

namespace {

ScenarioConfig big_population(std::size_t n) {
  ScenarioConfig c;
  c.name = "big";
  c.n_individuals = n;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("simulated clearances have median 2 L/h and variance 0.1") {
  const Population pop = generate_population(big_population(100000));
  std::vector<double> theta, cl;
  for (const auto& p : pop.latent) {
    theta.push_back(p.theta);
    cl.push_back(std::exp(p.theta));
  }
  std::nth_element(cl.begin(), cl.begin() + 50000, cl.end());
  CHECK(cl[50000] == doctest::Approx(2.0).epsilon(0.01));
  const double sd = test::sd_of(theta);
  CHECK(sd * sd == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("latent clearances and log-residuals pass KS tests") {
  ScenarioConfig c = big_population(20000);
  c.schedule = kRichSchedule;
  const Population pop = generate_population(c);
  std::vector<double> theta, resid;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    theta.push_back(pop.latent[i].theta);
    const auto& obs = pop.observations[i];
    resid.push_back(std::log(obs.values[3]) - log_concentration(c.pk, pop.latent[i], obs.times[3]));
  }
  const double crit = test::ks_critical_1pct(theta.size());
  CHECK(test::ks_statistic(theta, [](double x) {
          return test::normal_cdf((x - std::log(2.0)) / std::sqrt(0.1));
        }) < crit);
  CHECK(test::ks_statistic(resid, [](double x) { return test::normal_cdf(x / 0.1); }) < crit);
}

TEST_CASE("vanishing residual noise reproduces the model curve") {
  ScenarioConfig c = big_population(50);
  c.schedule = kRichSchedule;
  c.pk.sigma = 1e-12;
  const Population pop = generate_population(c);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    for (std::size_t j = 0; j < c.schedule.size(); ++j) {
      CHECK(pop.observations[i].values[j] ==
            doctest::Approx(concentration(c.pk, pop.latent[i], c.schedule[j])).epsilon(1e-10));
    }
  }
}

TEST_CASE("the four scenarios have the expected sizes and schedules") {
  const auto sc = four_scenarios(7);
  REQUIRE(sc.size() == 4);
  std::set<std::uint64_t> seeds;
  for (const auto& c : sc) {
    const Population pop = generate_population(c);
    std::size_t n_obs = 0;
    for (const auto& o : pop.observations) n_obs += o.size();
    if (c.name == "N20-sparse") CHECK(n_obs == 40);
    if (c.name == "N20-rich") CHECK(n_obs == 140);
    if (c.name == "N100-sparse") CHECK(n_obs == 200);
    if (c.name == "N100-rich") CHECK(n_obs == 700);
    CHECK(c.zeta_true == true_population());
    seeds.insert(c.seed);
  }
  CHECK(seeds.size() == 4);
  CHECK(sc[0].name == "N20-sparse");
  CHECK(sc[3].name == "N100-rich");
  CHECK(sc[3].schedule == std::vector<double>{0, 1, 2, 5, 11, 23, 47});

  // Derived seeds depend on the base seed.
  CHECK(four_scenarios(8)[0].seed != sc[0].seed);
  CHECK(scenario_by_name("N100-rich", 7).seed == sc[3].seed);
}

TEST_CASE("regeneration is bit-identical") {
  const ScenarioConfig c = scenario_by_name("N20-rich", 3);
  const Population a = generate_population(c);
  const Population b = generate_population(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.latent[i].theta == b.latent[i].theta);
    CHECK(a.observations[i].values == b.observations[i].values);
  }
  // A larger population extends a smaller one with the same seed.
  ScenarioConfig big = c;
  big.n_individuals = 100;
  const Population ext = generate_population(big);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(ext.latent[i].theta == a.latent[i].theta);
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(scenario_by_name("N50-rich", 0), ConfigError);
  ScenarioConfig c;
  c.n_individuals = 0;
  CHECK_THROWS_AS(generate_population(c), ConfigError);
  c = ScenarioConfig{};
  c.schedule = {1.0, 0.0};
  CHECK_THROWS_AS(generate_population(c), ConfigError);
  c = ScenarioConfig{};
  c.pk.sigma = 0.0;
  CHECK_THROWS_AS(generate_population(c), ConfigError);
}
