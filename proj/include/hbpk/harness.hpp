#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hbpk/inference.hpp"
#include "hbpk/io.hpp"
#include "hbpk/kde.hpp"
#include "hbpk/scenarios.hpp"

namespace hbpk {

/// Points and weights standing in for a posterior. Parametric results are
/// represented by i.i.d. draws from the fitted NIG.
struct PosteriorSample {
  std::vector<PopulationParams> points;
  std::vector<double> weights;  // empty means uniform
};

inline constexpr std::size_t kParametricDraws = 10000;

PosteriorSample posterior_sample(const InferenceResult& result,
                                 std::size_t parametric_draws = kParametricDraws);

/// Posterior mean and SD per coordinate; analytic for parametric results.
/// Needs no KDE, so it also works for a collapsed particle ensemble.
WeightedMoments posterior_moments(const InferenceResult& result);

struct AccuracyMetrics {
  PopulationParams mean;
  PopulationParams sd;
  bool truth_in_hdr = false;
  double hdr_area = 0.0;
  double hdr_mass = 0.0;
};

/// Posterior mean/SD per coordinate (analytic for parametric results), the
/// KDE HDR at `mass` and whether zeta_true lies inside it.
AccuracyMetrics accuracy_metrics(const InferenceResult& result,
                                 const PopulationParams& zeta_true, double mass = 0.8);

/// KDE HDR of a result; on `grid` when given, else the KDE default grid.
HdrRegion result_hdr(const InferenceResult& result, double mass,
                     const std::optional<GridSpec>& grid = std::nullopt);

/// HDR Jaccard overlap of two results on a shared grid covering both.
double result_overlap(const InferenceResult& a, const InferenceResult& b, double mass = 0.8);

struct RunSpec {
  std::string scenario;
  Algorithm algorithm = Algorithm::pmmh;
  AlgorithmConfig config;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;  // empty: nothing written
};

struct ReportRow {
  std::string scenario;
  Algorithm algorithm = Algorithm::pmmh;
  std::uint64_t seed = 0;
  std::size_t n_individuals = 0;
  std::size_t n_observations = 0;
  std::optional<AccuracyMetrics> metrics;
  double wall_seconds = 0.0;
  double seconds_per_individual = 0.0;
  Diagnostics diagnostics;
  std::string error;  // non-empty when the cell failed
  // Set when the run finished but its KDE summary did not (e.g. a filter
  // ensemble collapsed onto one point). metrics then holds moments only and
  // the HDR fields are NaN.
  std::string warning;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;

  [[nodiscard]] const ReportRow* find(std::string_view scenario, Algorithm a) const;
};

/// Simulates the scenario named in the spec (data seeded by spec.seed),
/// runs the algorithm and returns the result.
InferenceResult execute(const RunSpec& spec, Population* population = nullptr);

struct BenchmarkOptions {
  std::size_t jobs = 1;
  /// Cells run one at a time, regardless of `jobs`.
  bool timing_strict = false;
  /// Untimed run on the first individual before each timed cell.
  bool warmup = true;
};

/// Runs every spec; failures are recorded per row without aborting.
ComparisonReport runtime_benchmark(const std::vector<RunSpec>& specs,
                                   const BenchmarkOptions& options = {});

/// Four scenarios x four algorithms.
std::vector<RunSpec> paper_grid(bool reduced, std::uint64_t seed,
                                const std::filesystem::path& output_dir = {});

Json to_json(const ReportRow& row);
Json to_json(const ComparisonReport& report);
void write_report_csv(const std::filesystem::path& path, const ComparisonReport& report);

}  // namespace hbpk
