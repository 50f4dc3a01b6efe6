#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hbpk/errors.hpp"
#include "hbpk/harness.hpp"
#include "hbpk/inference.hpp"
#include "hbpk/scenarios.hpp"
#include "support.hpp"

using namespace hbpk;

namespace {

const NIGParams kPrior = default_prior();

Dataset scenario_data(const std::string& name, std::uint64_t seed) {
  const ScenarioConfig sc = scenario_by_name(name, seed);
  return generate_population(sc).dataset(sc.pk);
}

bool same_posterior(const Posterior& a, const Posterior& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<OuterEnsemble>(&a)) {
    const auto& y = std::get<OuterEnsemble>(b);
    return x->particles == y.particles && x->weights == y.weights;
  }
  if (const auto* x = std::get_if<NIGParams>(&a)) return *x == std::get<NIGParams>(b);
  return std::get<McmcSamples>(a) == std::get<McmcSamples>(b);
}

WeightedMoments moments(const InferenceResult& r) {
  if (const auto* h = std::get_if<NIGParams>(&r.posterior)) {
    const NigMoments m = nig_moments(*h);
    return {{m.mean_mu, m.mean_omega2}, {std::sqrt(m.var_mu), std::sqrt(m.var_omega2)}};
  }
  const PosteriorSample s = posterior_sample(r);
  return weighted_moments(s.points, s.weights);
}

double posterior_mean_mu(const InferenceResult& r) { return moments(r).mean.mu_cl; }

}  // namespace

TEST_CASE("a run split across two process calls equals a single call") {
  const Dataset d = scenario_data("N20-sparse", 1);
  const AlgorithmConfig cfg = AlgorithmConfig::reduced();
  const RngStream rng(2);
  for (Algorithm a : {Algorithm::npf, Algorithm::sinpf, Algorithm::mwg}) {
    const InferenceResult whole = run_sequential(a, d, kPrior, cfg, rng);
    SequentialRun split(a, kPrior, cfg, rng);
    const Dataset head(d.begin(), d.begin() + 7), tail(d.begin() + 7, d.end());
    split.process(head);
    CHECK(split.processed() == 7);
    split.process(tail);
    CHECK(same_posterior(whole.posterior, split.result().posterior));
    CHECK(whole.diagnostics.individual_seconds.size() == d.size());
  }
}

TEST_CASE("zero individuals returns the prior representation") {
  const AlgorithmConfig cfg = AlgorithmConfig::paper();
  const InferenceResult m = run_sequential(Algorithm::mwg, {}, kPrior, cfg, RngStream(3));
  CHECK(std::get<NIGParams>(m.posterior) == kPrior);

  for (Algorithm a : {Algorithm::npf, Algorithm::sinpf}) {
    const InferenceResult r = run_sequential(a, {}, kPrior, cfg, RngStream(3));
    const auto& e = std::get<OuterEnsemble>(r.posterior);
    REQUIRE(e.size() == cfg.pf.outer_size);
    for (double w : e.weights) CHECK(w == 1.0 / 1000.0);
    // The initial ensemble is a prior sample.
    const NigMoments pm = nig_moments(kPrior);
    const WeightedMoments wm = weighted_moments(e.particles, e.weights);
    CHECK(std::abs(wm.mean.mu_cl - pm.mean_mu) < 4.0 * std::sqrt(pm.var_mu / 1000.0));
    CHECK(std::abs(wm.mean.omega2_cl - pm.mean_omega2) < 4.0 * std::sqrt(pm.var_omega2 / 1000.0));
    CHECK(r.diagnostics.resample_count == 0);
  }
  // Both filters start from the same draws.
  CHECK(same_posterior(run_sequential(Algorithm::npf, {}, kPrior, cfg, RngStream(3)).posterior,
                       run_sequential(Algorithm::sinpf, {}, kPrior, cfg, RngStream(3)).posterior));
}

TEST_CASE("pmMH is not a sequential algorithm") {
  CHECK_THROWS_AS(SequentialRun(Algorithm::pmmh, kPrior, AlgorithmConfig::reduced(), RngStream(4)),
                  ConfigError);
}

TEST_CASE("degeneracy errors name the failing individual") {
  Dataset d;
  d.push_back(std::make_shared<GaussianLikelihood>(std::vector<double>{0.5}, 0.3));
  d.push_back(std::make_shared<GaussianLikelihood>(std::vector<double>{1e200}, 1e-200));
  for (Algorithm a : {Algorithm::npf, Algorithm::sinpf, Algorithm::mwg}) {
    try {
      (void)run_sequential(a, d, kPrior, AlgorithmConfig::reduced(), RngStream(5));
      FAIL("expected a degeneracy error");
    } catch (const DegeneracyError& e) {
      CHECK(std::string(e.what()).find("individual 1") != std::string::npos);
      CHECK(std::string(e.what()).find(to_string(a)) != std::string::npos);
    }
  }
}

TEST_CASE("seeded runs are reproducible and seeds matter") {
  const Dataset d = scenario_data("N20-rich", 6);
  const AlgorithmConfig cfg = AlgorithmConfig::reduced();
  for (Algorithm a : kAllAlgorithms) {
    const InferenceResult x = run_inference(a, d, kPrior, cfg, 7);
    const InferenceResult y = run_inference(a, d, kPrior, cfg, 7);
    const InferenceResult z = run_inference(a, d, kPrior, cfg, 8);
    CHECK(same_posterior(x.posterior, y.posterior));
    CHECK_FALSE(same_posterior(x.posterior, z.posterior));
  }
}

TEST_CASE("processing order changes the result only within Monte Carlo noise") {
  // Gaussian-observation data keeps this cheap; siNPF at reduced scale.
  Engine eng = RngStream(9).engine();
  std::normal_distribution<double> z;
  Dataset d;
  for (int i = 0; i < 20; ++i) {
    const double y = std::log(2.0) + std::sqrt(0.1) * z(eng) + 0.3 * z(eng);
    d.push_back(std::make_shared<GaussianLikelihood>(std::vector<double>{y}, 0.3));
  }
  const AlgorithmConfig cfg = AlgorithmConfig::reduced();
  std::vector<double> by_order, by_seed;
  for (int k = 0; k < 20; ++k) {
    Dataset perm = d;
    std::shuffle(perm.begin(), perm.end(), eng);
    by_order.push_back(posterior_mean_mu(run_sequential(Algorithm::sinpf, perm, kPrior, cfg,
                                                        RngStream(10))));
    by_seed.push_back(posterior_mean_mu(run_sequential(Algorithm::sinpf, d, kPrior, cfg,
                                                       RngStream(100 + k))));
  }
  // Equal-variance F test at the 1% level with (19, 19) dof: SD ratio < 1.74.
  CHECK(test::sd_of(by_order) < 1.74 * test::sd_of(by_seed));
}

TEST_CASE("posterior of mu contracts from N20-sparse to N100-rich for every algorithm") {
  const AlgorithmConfig cfg = AlgorithmConfig::reduced();
  for (Algorithm a : kAllAlgorithms) {
    int contracted = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      // Moments only: a collapsed filter ensemble has no KDE.
      const double sparse_sd =
          moments(run_inference(a, scenario_data("N20-sparse", seed), kPrior, cfg, seed)).sd.mu_cl;
      const double rich_sd =
          moments(run_inference(a, scenario_data("N100-rich", seed), kPrior, cfg, seed)).sd.mu_cl;
      contracted += rich_sd < sparse_sd ? 1 : 0;
    }
    INFO(to_string(a));
    CHECK(contracted == 5);
  }
}
