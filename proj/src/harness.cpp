#include "hbpk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <thread>

#include "hbpk/errors.hpp"

namespace hbpk {

namespace {

// Fixed stream for turning a parametric result into draws, so metrics are
// a pure function of the result.
constexpr std::uint64_t kParametricDrawSeed = 0x5eed'0f'd4a3ULL;

}  // namespace

PosteriorSample posterior_sample(const InferenceResult& result,
                                 std::size_t parametric_draws) {
  return std::visit(
      [&](const auto& p) -> PosteriorSample {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, McmcSamples>) {
          return {p, {}};
        } else if constexpr (std::is_same_v<T, OuterEnsemble>) {
          return {p.particles, p.weights};
        } else {
          Engine eng = RngStream(kParametricDrawSeed).engine();
          PosteriorSample s;
          s.points.reserve(parametric_draws);
          for (std::size_t k = 0; k < parametric_draws; ++k) {
            s.points.push_back(nig_sample(p, eng));
          }
          return s;
        }
      },
      result.posterior);
}

HdrRegion result_hdr(const InferenceResult& result, double mass,
                     const std::optional<GridSpec>& grid) {
  const auto sample = posterior_sample(result);
  const Kde2d kde(sample.points, sample.weights);
  return highest_density_region(kde, mass, grid.value_or(kde.default_grid()));
}

double result_overlap(const InferenceResult& a, const InferenceResult& b, double mass) {
  const auto sa = posterior_sample(a);
  const auto sb = posterior_sample(b);
  const Kde2d ka(sa.points, sa.weights);
  const Kde2d kb(sb.points, sb.weights);
  const GridSpec grid = grid_union(ka.default_grid(), kb.default_grid());
  return jaccard_overlap(highest_density_region(ka, mass, grid),
                         highest_density_region(kb, mass, grid));
}

WeightedMoments posterior_moments(const InferenceResult& result) {
  if (const auto* nig = std::get_if<NIGParams>(&result.posterior);
      nig != nullptr && nig->alpha0 > 2.0) {
    const auto mom = nig_moments(*nig);
    return {{mom.mean_mu, mom.mean_omega2}, {std::sqrt(mom.var_mu), std::sqrt(mom.var_omega2)}};
  }
  const auto sample = posterior_sample(result);
  return weighted_moments(sample.points, sample.weights);
}

AccuracyMetrics accuracy_metrics(const InferenceResult& result,
                                 const PopulationParams& zeta_true, double mass) {
  const auto sample = posterior_sample(result);
  AccuracyMetrics m;
  const WeightedMoments wm = posterior_moments(result);
  m.mean = wm.mean;
  m.sd = wm.sd;
  const Kde2d kde(sample.points, sample.weights);
  const HdrRegion hdr = highest_density_region(kde, mass, kde.default_grid());
  m.truth_in_hdr = kde.density(zeta_true) >= hdr.threshold;
  m.hdr_area = hdr.area();
  m.hdr_mass = hdr.mass;
  return m;
}

const ReportRow* ComparisonReport::find(std::string_view scenario, Algorithm a) const {
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.algorithm == a) return &r;
  }
  return nullptr;
}

InferenceResult execute(const RunSpec& spec, Population* population) {
  const ScenarioConfig scenario = scenario_by_name(spec.scenario, spec.seed);
  Population pop = generate_population(scenario);
  const Dataset data = pop.dataset(scenario.pk);
  InferenceResult result =
      run_inference(spec.algorithm, data, default_prior(), spec.config, spec.seed);
  if (population) *population = std::move(pop);
  return result;
}

namespace {

ReportRow run_cell(const RunSpec& spec, bool warmup) {
  ReportRow row;
  row.scenario = spec.scenario;
  row.algorithm = spec.algorithm;
  row.seed = spec.seed;
  try {
    const ScenarioConfig scenario = scenario_by_name(spec.scenario, spec.seed);
    const Population pop = generate_population(scenario);
    const Dataset data = pop.dataset(scenario.pk);
    row.n_individuals = pop.size();
    for (const auto& obs : pop.observations) row.n_observations += obs.size();

    if (warmup) {
      const Dataset first(data.begin(), data.begin() + 1);
      try {
        (void)run_inference(spec.algorithm, first, default_prior(), spec.config,
                            spec.seed ^ 0xa5a5a5a5ULL);
      } catch (const DegeneracyError&) {
        // A one-individual chain may legitimately stall; only timing matters.
      }
    }
    const InferenceResult result =
        run_inference(spec.algorithm, data, default_prior(), spec.config, spec.seed);
    row.diagnostics = result.diagnostics;
    row.wall_seconds = result.diagnostics.wall_seconds;
    row.seconds_per_individual = row.wall_seconds / static_cast<double>(row.n_individuals);
    try {
      row.metrics = accuracy_metrics(result, scenario.zeta_true);
    } catch (const DegeneracyError& e) {
      const WeightedMoments wm = posterior_moments(result);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.metrics = AccuracyMetrics{wm.mean, wm.sd, false, nan, nan};
      row.warning = e.what();
    }

    if (!spec.output_dir.empty()) {
      const auto stem = spec.output_dir /
                        (spec.scenario + "_" + std::string(to_string(spec.algorithm)));
      write_result(stem, result, {spec.scenario, spec.seed, spec.config});
      auto hdr_path = stem;
      hdr_path += "_hdr.json";
      if (row.warning.empty()) write_json(hdr_path, to_json(result_hdr(result, 0.8)));
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

ComparisonReport runtime_benchmark(const std::vector<RunSpec>& specs,
                                   const BenchmarkOptions& options) {
  ComparisonReport report;
  report.rows.resize(specs.size());
  const std::size_t jobs =
      options.timing_strict ? 1 : std::max<std::size_t>(1, std::min(options.jobs, specs.size()));
  if (jobs == 1) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      report.rows[k] = run_cell(specs[k], options.warmup);
    }
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < specs.size(); k = next++) {
        report.rows[k] = run_cell(specs[k], options.warmup);
      }
    });
  }
  workers.clear();  // joins
  return report;
}

std::vector<RunSpec> paper_grid(bool reduced, std::uint64_t seed,
                                const std::filesystem::path& output_dir) {
  std::vector<RunSpec> specs;
  for (const auto& scenario : four_scenarios(seed)) {
    for (Algorithm a : kAllAlgorithms) {
      specs.push_back({scenario.name, a,
                       reduced ? AlgorithmConfig::reduced() : AlgorithmConfig::paper(),
                       seed, output_dir});
    }
  }
  return specs;
}

Json to_json(const ReportRow& row) {
  Json j{{"scenario", row.scenario},
         {"algorithm", to_string(row.algorithm)},
         {"seed", row.seed},
         {"n_individuals", row.n_individuals},
         {"n_observations", row.n_observations},
         {"wall_seconds", row.wall_seconds},
         {"seconds_per_individual", row.seconds_per_individual},
         {"diagnostics", to_json(row.diagnostics)}};
  if (row.metrics) {
    const auto& m = *row.metrics;
    j["posterior_mean"] = to_json(m.mean);
    j["posterior_sd"] = to_json(m.sd);
    const bool has_hdr = row.warning.empty();
    j["truth_in_hdr80"] = has_hdr ? Json(m.truth_in_hdr) : Json();
    j["hdr80_area"] = has_hdr ? Json(m.hdr_area) : Json();
    j["hdr80_mass"] = has_hdr ? Json(m.hdr_mass) : Json();
  }
  j["error"] = row.error.empty() ? Json() : Json(row.error);
  j["warning"] = row.warning.empty() ? Json() : Json(row.warning);
  return j;
}

Json to_json(const ComparisonReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  return {{"rows", rows}};
}

void write_report_csv(const std::filesystem::path& path, const ComparisonReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::setprecision(10);
  out << "scenario,algorithm,seed,n_individuals,n_observations,mean_mu_cl,sd_mu_cl,"
         "mean_omega2_cl,sd_omega2_cl,truth_in_hdr80,hdr80_area,wall_seconds,"
         "seconds_per_individual,acceptance_rate,resample_count,error,warning\n";
  for (const auto& r : report.rows) {
    out << r.scenario << ',' << to_string(r.algorithm) << ',' << r.seed << ','
        << r.n_individuals << ',' << r.n_observations << ',';
    if (r.metrics) {
      const auto& m = *r.metrics;
      out << m.mean.mu_cl << ',' << m.sd.mu_cl << ',' << m.mean.omega2_cl << ','
          << m.sd.omega2_cl << ',';
      if (r.warning.empty()) {
        out << (m.truth_in_hdr ? 1 : 0) << ',' << m.hdr_area << ',';
      } else {
        out << ",,";
      }
    } else {
      out << ",,,,,,";
    }
    auto cell = [](std::string text) {
      std::replace(text.begin(), text.end(), ',', ';');
      return text;
    };
    out << r.wall_seconds << ',' << r.seconds_per_individual << ','
        << r.diagnostics.acceptance_rate << ',' << r.diagnostics.resample_count << ','
        << cell(r.error) << ',' << cell(r.warning) << '\n';
  }
}

}  // namespace hbpk
