#include "hbpk/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hbpk/errors.hpp"

namespace hbpk {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() && s.find_first_not_of(" \r\t", used) != std::string::npos) {
      throw std::invalid_argument(s);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
}

/// Data rows of a CSV: comment lines (#) and the header row are skipped.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path,
                                                  std::size_t columns) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != columns) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path, line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_dataset_csv(const fs::path& path, const Population& pop,
                       const PkConstants& pk) {
  auto out = open_out(path);
  out << "individual_id,time_h,concentration,dose\n";
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& obs = pop.observations[i];
    for (std::size_t j = 0; j < obs.size(); ++j) {
      out << i << ',' << obs.times[j] << ',' << obs.values[j] << ',' << pk.dose << '\n';
    }
  }
}

void write_latent_csv(const fs::path& path, const Population& pop) {
  auto out = open_out(path);
  out << "# evaluation only: latent log-clearance per individual, not used for inference\n";
  out << "individual_id,theta\n";
  for (std::size_t i = 0; i < pop.size(); ++i) out << i << ',' << pop.latent[i].theta << '\n';
}

LoadedDataset read_dataset_csv(const fs::path& path) {
  const auto rows = read_numeric_csv(path, 4);
  if (rows.empty()) throw ConfigError(path.string() + ": no observations");
  LoadedDataset data;
  data.dose = rows.front()[3];
  double current_id = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row[3] != data.dose) {
      throw ConfigError(path.string() + ": all individuals must share one dose");
    }
    if (!(row[0] == current_id)) {
      current_id = row[0];
      data.observations.emplace_back();
    }
    data.observations.back().times.push_back(row[1]);
    data.observations.back().values.push_back(row[2]);
  }
  for (const auto& obs : data.observations) obs.validate();
  return data;
}

void write_ensemble_csv(const fs::path& path, const std::vector<PopulationParams>& points,
                        const std::vector<double>& weights) {
  auto out = open_out(path);
  out << "mu_cl,omega2_cl,weight\n";
  const double uniform = points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out << points[k].mu_cl << ',' << points[k].omega2_cl << ','
        << (weights.empty() ? uniform : weights[k]) << '\n';
  }
}

OuterEnsemble read_ensemble_csv(const fs::path& path) {
  OuterEnsemble e;
  for (const auto& row : read_numeric_csv(path, 3)) {
    e.particles.push_back({row[0], row[1]});
    e.weights.push_back(row[2]);
  }
  return e;
}

Json to_json(const PopulationParams& p) {
  return {{"mu_cl", p.mu_cl}, {"omega2_cl", p.omega2_cl}};
}

Json to_json(const NIGParams& h) {
  return {{"mu0", h.mu0}, {"kappa0", h.kappa0}, {"alpha0", h.alpha0}, {"beta0", h.beta0}};
}

PopulationParams population_from_json(const Json& j) {
  return {j.at("mu_cl").get<double>(), j.at("omega2_cl").get<double>()};
}

NIGParams nig_from_json(const Json& j) {
  return {j.at("mu0").get<double>(), j.at("kappa0").get<double>(),
          j.at("alpha0").get<double>(), j.at("beta0").get<double>()};
}

Json to_json(const AlgorithmConfig& c) {
  Json mcmc{{"chain_length", c.mcmc.chain_length},
            {"burn_in_fraction", c.mcmc.burn_in_fraction},
            {"mc_samples", c.mcmc.mc_samples},
            {"proposal_sd", to_json(c.mcmc.proposal_sd)}};
  if (c.mcmc.initial) mcmc["initial"] = to_json(*c.mcmc.initial);
  Json pf{{"outer_size", c.pf.outer_size},
          {"inner_size", c.pf.inner_size},
          {"ess_threshold_fraction", c.pf.ess_threshold_fraction}};
  pf["rejuvenation_sd"] = c.pf.rejuvenation_sd ? to_json(*c.pf.rejuvenation_sd) : Json();
  Json mwg{{"chain_length", c.mwg.chain_length},
           {"burn_in_fraction", c.mwg.burn_in_fraction},
           {"inner_size", c.mwg.inner_size},
           {"rejuvenation_fraction", c.mwg.rejuvenation_fraction},
           {"rejuvenation_floor", c.mwg.rejuvenation_floor},
           {"inner_sequential", c.mwg.inner_sequential},
           {"inner_ess_threshold_fraction", c.mwg.inner_ess_threshold_fraction}};
  return {{"mcmc", mcmc}, {"pf", pf}, {"mwg", mwg}};
}

AlgorithmConfig config_from_json(const Json& j) {
  AlgorithmConfig c;
  const auto& mcmc = j.at("mcmc");
  c.mcmc.chain_length = mcmc.at("chain_length").get<std::size_t>();
  c.mcmc.burn_in_fraction = mcmc.at("burn_in_fraction").get<double>();
  c.mcmc.mc_samples = mcmc.at("mc_samples").get<std::size_t>();
  c.mcmc.proposal_sd = population_from_json(mcmc.at("proposal_sd"));
  if (mcmc.contains("initial")) c.mcmc.initial = population_from_json(mcmc.at("initial"));
  const auto& pf = j.at("pf");
  c.pf.outer_size = pf.at("outer_size").get<std::size_t>();
  c.pf.inner_size = pf.at("inner_size").get<std::size_t>();
  c.pf.ess_threshold_fraction = pf.at("ess_threshold_fraction").get<double>();
  if (pf.contains("rejuvenation_sd") && !pf.at("rejuvenation_sd").is_null()) {
    c.pf.rejuvenation_sd = population_from_json(pf.at("rejuvenation_sd"));
  }
  const auto& mwg = j.at("mwg");
  c.mwg.chain_length = mwg.at("chain_length").get<std::size_t>();
  c.mwg.burn_in_fraction = mwg.at("burn_in_fraction").get<double>();
  c.mwg.inner_size = mwg.at("inner_size").get<std::size_t>();
  c.mwg.rejuvenation_fraction = mwg.at("rejuvenation_fraction").get<double>();
  c.mwg.rejuvenation_floor = mwg.at("rejuvenation_floor").get<double>();
  c.mwg.inner_sequential = mwg.at("inner_sequential").get<bool>();
  c.mwg.inner_ess_threshold_fraction = mwg.at("inner_ess_threshold_fraction").get<double>();
  return c;
}

Json to_json(const Diagnostics& d) {
  return {{"acceptance_rate", d.acceptance_rate},
          {"resample_count", d.resample_count},
          {"individual_seconds", d.individual_seconds},
          {"wall_seconds", d.wall_seconds}};
}

Json to_json(const GridSpec& g) {
  return {{"x", "mu_cl"}, {"y", "omega2_cl"},
          {"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx},
          {"y_min", g.y_min}, {"y_max", g.y_max}, {"ny", g.ny},
          {"layout", "row-major, index = ix * ny + iy"}};
}

Json to_json(const HdrRegion& r) {
  Json mask = Json::array();
  for (std::size_t ix = 0; ix < r.grid.nx; ++ix) {
    Json row = Json::array();
    for (std::size_t iy = 0; iy < r.grid.ny; ++iy) {
      row.push_back(r.mask[ix * r.grid.ny + iy] != 0);
    }
    mask.push_back(std::move(row));
  }
  return {{"grid", to_json(r.grid)}, {"threshold", r.threshold},
          {"mass", r.mass}, {"area", r.area()}, {"mask", std::move(mask)}};
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_result(const fs::path& stem, const InferenceResult& result,
                  const ResultHeader& header) {
  fs::path csv = stem;
  csv += ".csv";
  fs::path json = stem;
  json += ".json";

  Json j{{"algorithm", to_string(result.algorithm)},
         {"kind", to_string(result.kind())},
         {"scenario", header.scenario},
         {"seed", header.seed},
         {"config", to_json(header.config)},
         {"diagnostics", to_json(result.diagnostics)},
         {"payload", csv.filename().string()}};

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, McmcSamples>) {
          write_ensemble_csv(csv, p, {});
        } else if constexpr (std::is_same_v<T, OuterEnsemble>) {
          write_ensemble_csv(csv, p.particles, p.weights);
        } else {
          j["nig"] = to_json(p);
          auto out = open_out(csv);
          out << "mu0,kappa0,alpha0,beta0\n"
              << p.mu0 << ',' << p.kappa0 << ',' << p.alpha0 << ',' << p.beta0 << '\n';
        }
      },
      result.posterior);
  write_json(json, j);
}

InferenceResult read_result(const fs::path& json_path, ResultHeader* header) {
  auto in = open_in(json_path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError(json_path.string() + ": " + e.what());
  }
  InferenceResult r;
  try {
    r.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    const auto kind = j.at("kind").get<std::string>();
    const fs::path csv = json_path.parent_path() / j.at("payload").get<std::string>();
    if (kind == to_string(ResultKind::parametric)) {
      r.posterior = nig_from_json(j.at("nig"));
    } else if (kind == to_string(ResultKind::weighted_ensemble)) {
      r.posterior = read_ensemble_csv(csv);
    } else if (kind == to_string(ResultKind::mcmc_samples)) {
      r.posterior = read_ensemble_csv(csv).particles;
    } else {
      throw ConfigError(json_path.string() + ": unknown result kind '" + kind + "'");
    }
    const auto& d = j.at("diagnostics");
    r.diagnostics.acceptance_rate = d.at("acceptance_rate").get<double>();
    r.diagnostics.resample_count = d.at("resample_count").get<std::size_t>();
    r.diagnostics.individual_seconds = d.at("individual_seconds").get<std::vector<double>>();
    r.diagnostics.wall_seconds = d.at("wall_seconds").get<double>();
    if (header) {
      header->scenario = j.value("scenario", "");
      header->seed = j.value("seed", std::uint64_t{0});
      if (j.contains("config")) header->config = config_from_json(j.at("config"));
    }
  } catch (const Json::exception& e) {
    throw ConfigError(json_path.string() + ": " + e.what());
  }
  return r;
}

}  // namespace hbpk
