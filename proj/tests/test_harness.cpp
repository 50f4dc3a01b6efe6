#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "hbpk/errors.hpp"
#include "hbpk/harness.hpp"
#include "hbpk/io.hpp"
#include "support.hpp"

using namespace hbpk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("hbpk_test_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

InferenceResult samples_result(std::vector<PopulationParams> s) {
  InferenceResult r;
  r.algorithm = Algorithm::pmmh;
  r.posterior = std::move(s);
  return r;
}

std::vector<PopulationParams> nig_draws(const NIGParams& h, std::size_t n, std::uint64_t seed) {
  Engine eng = RngStream(seed).engine();
  std::vector<PopulationParams> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(nig_sample(h, eng));
  return out;
}

// A posterior-like NIG: mean near the truth, SD of mu about 0.07.
const NIGParams kTarget{std::log(2.0), 21.0, 12.0, 1.1};

AlgorithmConfig tiny_config() {
  AlgorithmConfig c = AlgorithmConfig::reduced();
  c.mcmc.chain_length = 400;
  c.pf.outer_size = 50;
  c.pf.inner_size = 50;
  c.mwg.chain_length = 400;
  c.mwg.inner_size = 50;
  return c;
}

}  // namespace

TEST_CASE("dataset CSV round trip") {
  TempDir dir("dataset");
  const ScenarioConfig sc = scenario_by_name("N20-rich", 4);
  const Population pop = generate_population(sc);
  write_dataset_csv(dir.path / "data.csv", pop, sc.pk);
  write_latent_csv(dir.path / "latent.csv", pop);
  const LoadedDataset back = read_dataset_csv(dir.path / "data.csv");
  CHECK(back.dose == sc.pk.dose);
  REQUIRE(back.observations.size() == pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(back.observations[i].times == pop.observations[i].times);
    CHECK(back.observations[i].values == pop.observations[i].values);
  }
  CHECK_THROWS_AS(read_dataset_csv(dir.path / "missing.csv"), ConfigError);
  std::ofstream(dir.path / "bad.csv") << "individual_id,time_h,concentration,dose\n0,1,abc,100\n";
  CHECK_THROWS_AS(read_dataset_csv(dir.path / "bad.csv"), ConfigError);
}

TEST_CASE("result files round trip for every result kind") {
  TempDir dir("result");
  const Dataset d = generate_population(scenario_by_name("N20-sparse", 5))
                        .dataset(PkConstants{});
  const AlgorithmConfig cfg = tiny_config();
  for (Algorithm a : kAllAlgorithms) {
    const InferenceResult r = run_inference(a, d, default_prior(), cfg, 5);
    const fs::path stem = dir.path / std::string(to_string(a));
    write_result(stem, r, {"N20-sparse", 5, cfg});
    ResultHeader h;
    const InferenceResult back = read_result(fs::path(stem.string() + ".json"), &h);
    CHECK(back.algorithm == a);
    CHECK(back.posterior.index() == r.posterior.index());
    CHECK(h.scenario == "N20-sparse");
    CHECK(h.seed == 5);
    CHECK(to_json(h.config) == to_json(cfg));
    CHECK(back.diagnostics.wall_seconds == r.diagnostics.wall_seconds);
    const PosteriorSample s0 = posterior_sample(r), s1 = posterior_sample(back);
    CHECK(s0.points == s1.points);
    if (!s0.weights.empty()) CHECK(s0.weights == s1.weights);
  }
  CHECK_THROWS_AS(read_result(dir.path / "nope.json"), ConfigError);
  std::ofstream(dir.path / "broken.json") << "{\"algorithm\": \"npf\"";
  CHECK_THROWS_AS(read_result(dir.path / "broken.json"), ConfigError);
}

TEST_CASE("accuracy metrics on exact NIG draws match the analytic moments") {
  const std::size_t n = 20000;
  const auto draws = nig_draws(kTarget, n, 6);
  const AccuracyMetrics m = accuracy_metrics(samples_result(draws), true_population());
  const NigMoments a = nig_moments(kTarget);

  std::vector<double> mu, w;
  for (const auto& p : draws) {
    mu.push_back(p.mu_cl);
    w.push_back(p.omega2_cl);
  }
  const double sd_mu = std::sqrt(a.var_mu), sd_w = std::sqrt(a.var_omega2);
  CHECK(std::abs(m.mean.mu_cl - a.mean_mu) < 3.0 * sd_mu / std::sqrt(double(n)));
  CHECK(std::abs(m.mean.omega2_cl - a.mean_omega2) < 3.0 * sd_w / std::sqrt(double(n)));
  // MCSE of a sample SD from the fourth central moment.
  auto sd_mcse = [n](const std::vector<double>& x, double sd) {
    const double mean = test::mean_of(x);
    double m4 = 0.0;
    for (double v : x) m4 += std::pow(v - mean, 4);
    m4 /= double(n);
    return std::sqrt((m4 - std::pow(sd, 4)) / (4.0 * sd * sd * double(n)));
  };
  CHECK(std::abs(m.sd.mu_cl - sd_mu) < 3.0 * sd_mcse(mu, sd_mu));
  CHECK(std::abs(m.sd.omega2_cl - sd_w) < 3.0 * sd_mcse(w, sd_w));

  CHECK(m.truth_in_hdr);
  CHECK(m.hdr_mass >= 0.8);
  CHECK(m.hdr_mass <= 0.82);
  CHECK(m.hdr_area > 0.0);
  CHECK_FALSE(accuracy_metrics(samples_result(draws), {std::log(2.0) + 1.0, 0.1}).truth_in_hdr);
}

TEST_CASE("parametric results use analytic moments") {
  InferenceResult r;
  r.algorithm = Algorithm::mwg;
  r.posterior = kTarget;
  const AccuracyMetrics m = accuracy_metrics(r, true_population());
  const NigMoments a = nig_moments(kTarget);
  CHECK(m.mean.mu_cl == a.mean_mu);
  CHECK(m.sd.omega2_cl == std::sqrt(a.var_omega2));
  CHECK(posterior_sample(r).points.size() == kParametricDraws);
  // Same draws every time.
  CHECK(posterior_sample(r).points == posterior_sample(r).points);
}

TEST_CASE("a point-mass result is degenerate") {
  CHECK_THROWS_AS(accuracy_metrics(samples_result(std::vector<PopulationParams>(500, {0.7, 0.1})),
                                   true_population()),
                  DegeneracyError);
  InferenceResult r;
  r.algorithm = Algorithm::npf;
  r.posterior = OuterEnsemble::uniform(std::vector<PopulationParams>(200, {0.7, 0.1}));
  CHECK_THROWS_AS(result_hdr(r, 0.8), DegeneracyError);
}

TEST_CASE("disjoint halves of one chain have overlapping HDRs") {
  const ScenarioConfig sc = scenario_by_name("N20-sparse", 7);
  const Dataset d = generate_population(sc).dataset(sc.pk);
  const InferenceResult r =
      run_inference(Algorithm::pmmh, d, default_prior(), AlgorithmConfig::reduced(), 7);
  const auto& s = std::get<McmcSamples>(r.posterior);
  const std::size_t half = s.size() / 2;
  const double j = result_overlap(samples_result({s.begin(), s.begin() + half}),
                                  samples_result({s.begin() + half, s.end()}));
  CHECK(j > 0.5);
  CHECK(result_overlap(r, r) == 1.0);
}

TEST_CASE("benchmark cells are pure and failures stay local") {
  std::vector<RunSpec> specs;
  for (Algorithm a : kAllAlgorithms) specs.push_back({"N20-sparse", a, tiny_config(), 3, {}});
  RunSpec bad{"N20-sparse", Algorithm::npf, tiny_config(), 3, {}};
  bad.config.pf.inner_size = 1;
  specs.push_back(bad);
  specs.push_back({"N7-sparse", Algorithm::npf, tiny_config(), 3, {}});

  const ComparisonReport a = runtime_benchmark(specs, {.jobs = 1});
  const ComparisonReport b = runtime_benchmark(specs, {.jobs = 3});
  REQUIRE(a.rows.size() == specs.size());
  for (std::size_t k = 0; k < 4; ++k) {
    INFO(a.rows[k].error);
    REQUIRE(a.rows[k].metrics.has_value());
    REQUIRE(b.rows[k].metrics.has_value());
    CHECK(a.rows[k].metrics->mean == b.rows[k].metrics->mean);
    CHECK(a.rows[k].metrics->sd == b.rows[k].metrics->sd);
    CHECK(a.rows[k].metrics->hdr_area == b.rows[k].metrics->hdr_area);
    CHECK(a.rows[k].n_observations == 40);
    CHECK(a.rows[k].wall_seconds > 0.0);
  }
  CHECK(a.rows[4].error.find("inner_size") != std::string::npos);
  CHECK_FALSE(a.rows[4].metrics.has_value());
  CHECK(a.rows[5].error.find("unknown scenario") != std::string::npos);
  CHECK(a.find("N20-sparse", Algorithm::sinpf) == &a.rows[2]);
  CHECK(a.find("N100-rich", Algorithm::sinpf) == nullptr);

  TempDir dir("report");
  write_report_csv(dir.path / "report.csv", a);
  std::ifstream in(dir.path / "report.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == specs.size() + 1);
  CHECK(to_json(a).at("rows").size() == specs.size());
}

TEST_CASE("paper grid and execute") {
  const auto grid = paper_grid(true, 9);
  CHECK(grid.size() == 16);
  CHECK(grid[0].config.pf.outer_size == 200);
  CHECK(paper_grid(false, 9)[0].config.pf.outer_size == 1000);

  Population pop;
  const RunSpec spec{"N20-sparse", Algorithm::sinpf, tiny_config(), 9, {}};
  const InferenceResult r = execute(spec, &pop);
  CHECK(pop.size() == 20);
  CHECK(std::get<OuterEnsemble>(r.posterior).size() == 50);
  const PosteriorSample s0 = posterior_sample(r), s1 = posterior_sample(execute(spec));
  CHECK(s0.points == s1.points);
}
