#include <chrono>
#include <string>

#include "hbpk/errors.hpp"
#include "hbpk/inference.hpp"

namespace hbpk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SequentialRun::SequentialRun(Algorithm algorithm, const NIGParams& prior,
                             AlgorithmConfig cfg, const RngStream& rng)
    : algorithm_(algorithm), cfg_(std::move(cfg)), rng_(rng) {
  prior.validate();
  switch (algorithm_) {
    case Algorithm::pmmh:
      throw ConfigError("pmmh is a batch algorithm; use pm_mh_is");
    case Algorithm::npf:
    case Algorithm::sinpf: {
      cfg_.pf.validate();
      Engine eng = rng_.child("init").engine();
      std::vector<PopulationParams> particles(cfg_.pf.outer_size);
      for (auto& p : particles) p = nig_sample(prior, eng);
      state_ = OuterEnsemble::uniform(std::move(particles));
      break;
    }
    case Algorithm::mwg:
      cfg_.mwg.validate();
      state_ = prior;
      break;
  }
}

void SequentialRun::process(const IndividualLikelihood& y) {
  const std::size_t index = processed_;
  const RngStream stream = rng_.child(static_cast<std::uint64_t>(index));
  const auto start = Clock::now();
  try {
    switch (algorithm_) {
      case Algorithm::npf:
      case Algorithm::sinpf: {
        const auto& outer = std::get<OuterEnsemble>(state_);
        OuterUpdate next = algorithm_ == Algorithm::npf
                               ? npf_update(outer, y, cfg_.pf, stream)
                               : sinpf_update(outer, y, cfg_.pf, stream);
        diag_.resample_count += next.resampled ? 1 : 0;
        state_ = std::move(next.ensemble);
        break;
      }
      case Algorithm::mwg: {
        MwgUpdate next = mwg_update(std::get<NIGParams>(state_), y, cfg_.mwg, stream);
        acceptance_sum_ += next.acceptance_rate;
        state_ = next.posterior;
        break;
      }
      case Algorithm::pmmh:
        break;
    }
  } catch (const DegeneracyError& e) {
    throw DegeneracyError(std::string(to_string(algorithm_)) + ", individual " +
                          std::to_string(index) + ": " + e.what());
  }
  diag_.individual_seconds.push_back(seconds_since(start));
  ++processed_;
}

void SequentialRun::process(const Dataset& data) {
  for (const auto& y : data) process(*y);
}

InferenceResult SequentialRun::result() const {
  InferenceResult r;
  r.algorithm = algorithm_;
  r.diagnostics = diag_;
  if (algorithm_ == Algorithm::mwg && processed_ > 0) {
    r.diagnostics.acceptance_rate = acceptance_sum_ / static_cast<double>(processed_);
  }
  for (double s : diag_.individual_seconds) r.diagnostics.wall_seconds += s;
  std::visit([&](const auto& s) { r.posterior = s; }, state_);
  return r;
}

InferenceResult run_sequential(Algorithm algorithm, const Dataset& data,
                               const NIGParams& prior, const AlgorithmConfig& cfg,
                               const RngStream& rng) {
  SequentialRun run(algorithm, prior, cfg, rng);
  run.process(data);
  return run.result();
}

InferenceResult run_inference(Algorithm algorithm, const Dataset& data,
                              const NIGParams& prior, const AlgorithmConfig& cfg,
                              std::uint64_t seed) {
  const RngStream rng = RngStream(seed).child(to_string(algorithm));
  const auto start = Clock::now();
  InferenceResult r = algorithm == Algorithm::pmmh
                          ? pm_mh_is(data, prior, cfg.mcmc, rng)
                          : run_sequential(algorithm, data, prior, cfg, rng);
  r.diagnostics.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace hbpk
