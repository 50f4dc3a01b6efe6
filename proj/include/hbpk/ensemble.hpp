#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hbpk/distributions.hpp"
#include "hbpk/errors.hpp"
#include "hbpk/rng.hpp"

namespace hbpk {

/// Particles with non-negative weights. Weights sum to one once normalized.
template <class P>
struct WeightedEnsemble {
  std::vector<P> particles;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return particles.size(); }

  static WeightedEnsemble uniform(std::vector<P> particles) {
    const double w = particles.empty() ? 0.0 : 1.0 / static_cast<double>(particles.size());
    std::vector<double> weights(particles.size(), w);
    return {std::move(particles), std::move(weights)};
  }
};

using OuterEnsemble = WeightedEnsemble<PopulationParams>;
using InnerEnsemble = WeightedEnsemble<IndividualParams>;

/// log(sum exp(x)); -inf for empty input or all -inf.
double log_sum_exp(std::span<const double> x);

/// exp(logw - max) / sum. Throws DegeneracyError if every entry is -inf
/// or any entry is NaN.
std::vector<double> normalize_log_weights(std::span<const double> log_weights);

/// Divides weights by their sum. Throws DegeneracyError when the sum is 0
/// or not finite.
std::vector<double> normalize_weights(std::span<const double> weights);

template <class P>
WeightedEnsemble<P> normalize(WeightedEnsemble<P> e) {
  e.weights = normalize_weights(e.weights);
  return e;
}

/// Kish effective sample size 1 / sum w^2 of normalized weights.
double effective_sample_size(std::span<const double> weights);

/// Inverse-cdf sampler over a fixed weight vector.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> weights);
  std::size_t operator()(Engine& rng) const;

 private:
  std::vector<double> cdf_;
  std::vector<double> weights_;
};

/// n i.i.d. categorical draws of indices from normalized weights.
std::vector<std::size_t> multinomial_indices(std::span<const double> weights,
                                             std::size_t n, Engine& rng);

/// Multinomial resampling to the same size; output weights are 1/S.
template <class P>
WeightedEnsemble<P> resample(const WeightedEnsemble<P>& e, Engine& rng) {
  const auto idx = multinomial_indices(e.weights, e.size(), rng);
  std::vector<P> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(e.particles[i]);
  return WeightedEnsemble<P>::uniform(std::move(out));
}

/// Additive N(0, sd^2) noise per coordinate. omega2 stays positive: noise
/// driving it to <= 0 is redrawn.
OuterEnsemble rejuvenate(OuterEnsemble e, const PopulationParams& sd, Engine& rng);
InnerEnsemble rejuvenate(InnerEnsemble e, double sd, Engine& rng);

/// Smallest value whose cumulative weight reaches half the total weight.
/// Expected linear time (weighted quickselect), no full sort.
double weighted_median(std::span<const double> values, std::span<const double> weights);

/// Componentwise weighted median.
PopulationParams weighted_median(const OuterEnsemble& e);

struct WeightedMoments {
  PopulationParams mean;
  PopulationParams sd;
};

/// Weighted mean and SD per coordinate (weights need not be normalized).
WeightedMoments weighted_moments(std::span<const PopulationParams> particles,
                                 std::span<const double> weights);

}  // namespace hbpk
