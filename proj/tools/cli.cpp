#include "cli.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

#include "hbpk/errors.hpp"
#include "hbpk/harness.hpp"
#include "hbpk/io.hpp"

namespace hbpk::cli {

namespace {

namespace fs = std::filesystem;

fs::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "hbpk_out";
}

/// Optional per-run overrides on top of the full or reduced preset.
struct ConfigOverrides {
  bool reduced = false;
  std::optional<std::size_t> outer_size, inner_size, chain_length, mc_samples;
  std::optional<double> burn_in, ess_threshold, proposal_sd_mu, proposal_sd_omega2;
  std::optional<std::vector<double>> pf_rejuvenation_sd;
  bool mwg_inner_sequential = false;

  void add_to(CLI::App& app) {
    app.add_flag("--reduced", reduced, "Scale R, S and L down 5x");
    app.add_option("--outer-size", outer_size, "Outer ensemble size R");
    app.add_option("--inner-size", inner_size, "Inner ensemble size S (npf, sinpf, mwg)");
    app.add_option("--chain-length", chain_length, "Chain length L (pmmh, mwg)");
    app.add_option("--mc-samples", mc_samples, "Monte Carlo samples M (pmmh)");
    app.add_option("--burn-in", burn_in, "Burn-in fraction (pmmh, mwg)");
    app.add_option("--ess-threshold", ess_threshold, "Resample when ESS < fraction * R");
    app.add_option("--proposal-sd-mu", proposal_sd_mu, "pmmh random-walk SD for mu_cl");
    app.add_option("--proposal-sd-omega2", proposal_sd_omega2,
                   "pmmh random-walk SD for omega2_cl");
    app.add_option("--pf-rejuvenation-sd", pf_rejuvenation_sd,
                   "Outer rejuvenation SDs 'mu,omega2' (default off)")
        ->delimiter(',')
        ->expected(2);
    app.add_flag("--mwg-inner-sequential", mwg_inner_sequential,
                 "Weight the MwG inner ensemble one observation at a time");
  }

  [[nodiscard]] AlgorithmConfig build() const {
    AlgorithmConfig c = reduced ? AlgorithmConfig::reduced() : AlgorithmConfig::paper();
    if (outer_size) c.pf.outer_size = *outer_size;
    if (inner_size) c.pf.inner_size = c.mwg.inner_size = *inner_size;
    if (chain_length) c.mcmc.chain_length = c.mwg.chain_length = *chain_length;
    if (mc_samples) c.mcmc.mc_samples = *mc_samples;
    if (burn_in) c.mcmc.burn_in_fraction = c.mwg.burn_in_fraction = *burn_in;
    if (ess_threshold) c.pf.ess_threshold_fraction = *ess_threshold;
    if (proposal_sd_mu) c.mcmc.proposal_sd.mu_cl = *proposal_sd_mu;
    if (proposal_sd_omega2) c.mcmc.proposal_sd.omega2_cl = *proposal_sd_omega2;
    if (pf_rejuvenation_sd) {
      c.pf.rejuvenation_sd = PopulationParams{(*pf_rejuvenation_sd)[0], (*pf_rejuvenation_sd)[1]};
    }
    c.mwg.inner_sequential = mwg_inner_sequential;
    c.mcmc.validate();
    c.pf.validate();
    c.mwg.validate();
    return c;
  }
};

void print_metrics(std::ostream& out, const std::string& label, const AccuracyMetrics& m) {
  fmt::print(out,
             "{:<28} mean=({:.4f}, {:.4f}) sd=({:.4f}, {:.4f}) hdr80_area={:.5f} "
             "truth_in_hdr80={}\n",
             label, m.mean.mu_cl, m.mean.omega2_cl, m.sd.mu_cl, m.sd.omega2_cl,
             m.hdr_area, m.truth_in_hdr ? "yes" : "no");
}

int cmd_simulate(const std::string& scenario_name, std::uint64_t seed, double sigma,
                 const fs::path& out_dir, std::ostream& out) {
  // Same derived data seed as `infer --scenario` and the benchmark.
  ScenarioConfig scenario = scenario_by_name(scenario_name, seed);
  scenario.pk.sigma = sigma;
  const Population pop = generate_population(scenario);
  const fs::path data_path = out_dir / (scenario.name + "_seed" + std::to_string(seed) + ".csv");
  const fs::path latent_path =
      out_dir / (scenario.name + "_seed" + std::to_string(seed) + "_latent.csv");
  write_dataset_csv(data_path, pop, scenario.pk);
  write_latent_csv(latent_path, pop);
  std::size_t rows = 0;
  for (const auto& obs : pop.observations) rows += obs.size();
  fmt::print(out, "wrote {} observations for {} individuals to {}\n", rows, pop.size(),
             data_path.string());
  fmt::print(out, "latent parameters (evaluation only): {}\n", latent_path.string());
  return kExitOk;
}

struct InferArgs {
  std::string algorithm;
  std::string scenario = "N20-sparse";
  std::optional<std::string> data;
  std::uint64_t seed = 1;
  double sigma = 0.1;
  std::string tag;
};

int cmd_infer(const InferArgs& args, const AlgorithmConfig& cfg, const fs::path& out_dir,
              std::ostream& out) {
  const Algorithm algorithm = parse_algorithm(args.algorithm);
  PkConstants pk;
  pk.sigma = args.sigma;
  Dataset data;
  std::string label;
  PopulationParams truth = true_population();
  if (args.data) {
    const LoadedDataset loaded = read_dataset_csv(*args.data);
    pk.dose = loaded.dose;
    for (const auto& obs : loaded.observations) {
      data.push_back(std::make_shared<PkLikelihood>(pk, obs));
    }
    label = fs::path(*args.data).stem().string();
  } else {
    ScenarioConfig scenario = scenario_by_name(args.scenario, args.seed);
    scenario.pk = pk;
    data = generate_population(scenario).dataset(pk);
    label = scenario.name;
  }
  const InferenceResult result =
      run_inference(algorithm, data, default_prior(), cfg, args.seed);
  const std::string stem_name =
      args.tag.empty() ? label + "_" + std::string(to_string(algorithm)) : args.tag;
  const fs::path stem = out_dir / stem_name;
  write_result(stem, result, {label, args.seed, cfg});
  const std::string run_label = std::string(to_string(algorithm)) + " on " + label;
  try {
    auto hdr_path = stem;
    hdr_path += "_hdr.json";
    write_json(hdr_path, to_json(result_hdr(result, 0.8)));
    print_metrics(out, run_label, accuracy_metrics(result, truth));
  } catch (const DegeneracyError& e) {
    const WeightedMoments wm = posterior_moments(result);
    fmt::print(out, "{:<28} mean=({:.4f}, {:.4f}) sd=({:.4f}, {:.4f})\n", run_label,
               wm.mean.mu_cl, wm.mean.omega2_cl, wm.sd.mu_cl, wm.sd.omega2_cl);
    fmt::print(out, "warning: no HDR summary: {}\n", e.what());
  }
  fmt::print(out, "wall time {:.3f} s; result written to {}.json\n",
             result.diagnostics.wall_seconds, stem.string());
  return kExitOk;
}

int cmd_benchmark(const std::string& grid, bool reduced, std::uint64_t seed,
                  std::size_t replicates, const BenchmarkOptions& options,
                  const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  if (grid != "paper") throw ConfigError("unknown grid '" + grid + "' (expected paper)");
  std::vector<RunSpec> specs;
  for (std::size_t r = 0; r < replicates; ++r) {
    const fs::path cell_dir = out_dir / ("seed" + std::to_string(seed + r));
    auto part = paper_grid(reduced, seed + r, cell_dir);
    specs.insert(specs.end(), part.begin(), part.end());
  }
  const ComparisonReport report = runtime_benchmark(specs, options);
  write_report_csv(out_dir / "report.csv", report);
  write_json(out_dir / "report.json", to_json(report));

  std::size_t failures = 0;
  fmt::print(out, "{:<12} {:<6} {:>10} {:>10} {:>10} {:>10} {:>6} {:>10}\n", "scenario",
             "alg", "mean_mu", "sd_mu", "mean_w2", "sd_w2", "truth", "wall_s");
  for (const auto& row : report.rows) {
    if (!row.warning.empty()) {
      fmt::print(err, "cell {} / {}: no HDR summary: {}\n", row.scenario,
                 to_string(row.algorithm), row.warning);
    }
    if (!row.error.empty()) {
      ++failures;
      fmt::print(err, "cell {} / {} failed: {}\n", row.scenario, to_string(row.algorithm),
                 row.error);
      continue;
    }
    const auto& m = *row.metrics;
    fmt::print(out, "{:<12} {:<6} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>6} {:>10.3f}\n",
               row.scenario, to_string(row.algorithm), m.mean.mu_cl, m.sd.mu_cl,
               m.mean.omega2_cl, m.sd.omega2_cl, !row.warning.empty() ? "-" : m.truth_in_hdr ? "in" : "out",
               row.wall_seconds);
  }
  fmt::print(out, "{} rows written to {}\n", report.rows.size(),
             (out_dir / "report.csv").string());
  return failures == 0 ? kExitOk : kExitDegenerate;
}

int cmd_compare(const std::vector<std::string>& files, const std::vector<double>& truth_in,
                const std::optional<std::string>& out_file, std::ostream& out) {
  if (files.size() < 2) throw ConfigError("compare needs at least two result files");
  const PopulationParams truth{truth_in.at(0), truth_in.at(1)};
  std::vector<InferenceResult> results;
  std::vector<AccuracyMetrics> metrics;
  for (const auto& f : files) {
    results.push_back(read_result(f));
    metrics.push_back(accuracy_metrics(results.back(), truth));
    print_metrics(out, fs::path(f).stem().string(), metrics.back());
  }
  Json pairs = Json::array();
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const double overlap = result_overlap(results[a], results[b]);
      const PopulationParams dmean{metrics[b].mean.mu_cl - metrics[a].mean.mu_cl,
                                   metrics[b].mean.omega2_cl - metrics[a].mean.omega2_cl};
      const PopulationParams dsd{metrics[b].sd.mu_cl - metrics[a].sd.mu_cl,
                                 metrics[b].sd.omega2_cl - metrics[a].sd.omega2_cl};
      fmt::print(out,
                 "{} vs {}: delta mean=({:+.4f}, {:+.4f}) delta sd=({:+.4f}, {:+.4f}) "
                 "hdr80 jaccard={:.3f}\n",
                 fs::path(files[a]).stem().string(), fs::path(files[b]).stem().string(),
                 dmean.mu_cl, dmean.omega2_cl, dsd.mu_cl, dsd.omega2_cl, overlap);
      pairs.push_back({{"a", files[a]},
                       {"b", files[b]},
                       {"delta_mean", to_json(dmean)},
                       {"delta_sd", to_json(dsd)},
                       {"hdr80_jaccard", overlap}});
    }
  }
  if (out_file) write_json(*out_file, {{"pairs", pairs}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical Bayesian population PK inference toolkit", "hbpk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI key-value file");

  std::string out_dir_str = default_output_dir().string();
  app.add_option("--out", out_dir_str, "Output directory (default $HBPK_OUTPUT_DIR or ./hbpk_out)");

  auto* simulate = app.add_subcommand("simulate", "Simulate one scenario's dataset");
  std::string sim_scenario;
  std::uint64_t sim_seed = 1;
  double sim_sigma = 0.1;
  simulate->add_option("--scenario", sim_scenario, "N20-sparse | N20-rich | N100-sparse | N100-rich")
      ->required();
  simulate->add_option("--seed", sim_seed, "Data seed");
  simulate->add_option("--sigma", sim_sigma, "Residual SD on log scale");

  auto* infer = app.add_subcommand("infer", "Run one algorithm on one dataset");
  InferArgs infer_args;
  ConfigOverrides infer_cfg;
  infer->add_option("--algorithm", infer_args.algorithm, "pmmh | npf | sinpf | mwg")->required();
  infer->add_option("--scenario", infer_args.scenario, "Simulated scenario name");
  infer->add_option("--data", infer_args.data, "Dataset CSV instead of a simulated scenario")
      ->check(CLI::ExistingFile);
  infer->add_option("--seed", infer_args.seed, "Seed for data simulation and inference");
  infer->add_option("--sigma", infer_args.sigma, "Residual SD on log scale");
  infer->add_option("--tag", infer_args.tag, "Output file stem");
  infer_cfg.add_to(*infer);

  auto* bench = app.add_subcommand("benchmark", "Run the scenario x algorithm grid");
  std::string grid = "paper";
  std::uint64_t bench_seed = 1;
  std::size_t replicates = 1;
  BenchmarkOptions bench_opts;
  ConfigOverrides bench_cfg;
  bench->add_option("--grid", grid, "Grid name (paper)");
  bench->add_option("--seed", bench_seed, "Base seed");
  bench->add_option("--replicates", replicates, "Independent datasets per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--jobs", bench_opts.jobs, "Cells run in parallel")->check(CLI::PositiveNumber);
  bench->add_flag("--timing-strict", bench_opts.timing_strict, "Run cells one at a time");
  bench->add_flag("--reduced", bench_cfg.reduced, "Scale R, S and L down 5x");

  auto* compare = app.add_subcommand("compare", "Compare two or more result files");
  std::vector<std::string> compare_files;
  std::vector<double> truth{std::log(2.0), 0.1};
  std::optional<std::string> compare_out;
  compare->add_option("results", compare_files, "Result .json files")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--zeta-true", truth, "Reference point 'mu,omega2'")
      ->delimiter(',')
      ->expected(2);
  compare->add_option("--json", compare_out, "Write pairwise comparison JSON here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const fs::path out_dir = out_dir_str;
  try {
    if (*simulate) return cmd_simulate(sim_scenario, sim_seed, sim_sigma, out_dir, out);
    if (*infer) return cmd_infer(infer_args, infer_cfg.build(), out_dir, out);
    if (*bench) {
      return cmd_benchmark(grid, bench_cfg.reduced, bench_seed, replicates, bench_opts, out_dir,
                           out, err);
    }
    if (*compare) return cmd_compare(compare_files, truth, compare_out, out);
  } catch (const DegeneracyError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitDegenerate;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace hbpk::cli
