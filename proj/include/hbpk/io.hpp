#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbpk/inference.hpp"
#include "hbpk/kde.hpp"
#include "hbpk/scenarios.hpp"

namespace hbpk {

using Json = nlohmann::json;
namespace fs = std::filesystem;

/// Columns: individual_id,time_h,concentration,dose.
void write_dataset_csv(const fs::path& path, const Population& pop, const PkConstants& pk);

/// Columns: individual_id,theta. Marked evaluation-only in a leading comment.
void write_latent_csv(const fs::path& path, const Population& pop);

struct LoadedDataset {
  std::vector<ObservationSet> observations;
  double dose = 0.0;
};

/// Reads the dataset CSV; rows of one individual must be contiguous.
LoadedDataset read_dataset_csv(const fs::path& path);

/// Columns: mu_cl,omega2_cl,weight.
void write_ensemble_csv(const fs::path& path, const std::vector<PopulationParams>& points,
                        const std::vector<double>& weights);
OuterEnsemble read_ensemble_csv(const fs::path& path);

Json to_json(const PopulationParams& p);
Json to_json(const NIGParams& h);
Json to_json(const AlgorithmConfig& c);
Json to_json(const Diagnostics& d);
Json to_json(const GridSpec& g);
Json to_json(const HdrRegion& r);

PopulationParams population_from_json(const Json& j);
NIGParams nig_from_json(const Json& j);
AlgorithmConfig config_from_json(const Json& j);

/// Run metadata stored in the result header.
struct ResultHeader {
  std::string scenario;
  std::uint64_t seed = 0;
  AlgorithmConfig config;
};

/// Writes <stem>.json (header) and <stem>.csv (payload).
void write_result(const fs::path& stem, const InferenceResult& result,
                  const ResultHeader& header);

/// Reads a result from its .json header and the CSV it names.
InferenceResult read_result(const fs::path& json_path, ResultHeader* header = nullptr);

void write_json(const fs::path& path, const Json& j);

}  // namespace hbpk
