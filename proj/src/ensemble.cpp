#include "hbpk/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

namespace hbpk {

double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) {
    if (std::isnan(v)) throw DegeneracyError("weight is NaN");
    m = std::max(m, v);
  }
  if (!std::isfinite(m)) {
    throw DegeneracyError(
        "total weight degeneracy: every particle weight underflowed");
  }
  std::vector<double> w(log_weights.size());
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(log_weights[k] - m);
    s += w[k];
  }
  for (double& v : w) v /= s;
  return w;
}

std::vector<double> normalize_weights(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DegeneracyError("weights must be non-negative");
    s += w;
  }
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DegeneracyError("cannot normalize: weights sum to zero or overflow");
  }
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= s;
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return 1.0 / sq;
}

CategoricalSampler::CategoricalSampler(std::span<const double> weights)
    : cdf_(weights.size()), weights_(weights.begin(), weights.end()) {
  if (weights.empty()) throw ConfigError("CategoricalSampler: no weights");
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    cdf_[k] = acc;
  }
  if (!(acc > 0.0)) throw DegeneracyError("CategoricalSampler: zero total weight");
}

std::size_t CategoricalSampler::operator()(Engine& rng) const {
  std::uniform_real_distribution<double> u(0.0, cdf_.back());
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u(rng));
  auto i = std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  // Rounding at the top of the cdf can land on a trailing zero-weight slot.
  while (i > 0 && weights_[i] == 0.0) --i;
  return i;
}

std::vector<std::size_t> multinomial_indices(std::span<const double> weights,
                                             std::size_t n, Engine& rng) {
  const CategoricalSampler draw(weights);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = draw(rng);
  return idx;
}

OuterEnsemble rejuvenate(OuterEnsemble e, const PopulationParams& sd, Engine& rng) {
  if (sd.mu_cl < 0.0 || sd.omega2_cl < 0.0) {
    throw ConfigError("rejuvenate: noise SD must be >= 0");
  }
  std::normal_distribution<double> z;
  for (auto& p : e.particles) {
    if (sd.mu_cl > 0.0) p.mu_cl += sd.mu_cl * z(rng);
    if (sd.omega2_cl > 0.0) {
      double next;
      do {
        next = p.omega2_cl + sd.omega2_cl * z(rng);
      } while (!(next > 0.0));
      p.omega2_cl = next;
    }
  }
  return e;
}

InnerEnsemble rejuvenate(InnerEnsemble e, double sd, Engine& rng) {
  if (sd < 0.0) throw ConfigError("rejuvenate: noise SD must be >= 0");
  if (sd == 0.0) return e;
  std::normal_distribution<double> z;
  for (auto& p : e.particles) p.theta += sd * z(rng);
  return e;
}

double weighted_median(std::span<const double> values,
                       std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw ConfigError("weighted_median: empty or mismatched input");
  }
  std::vector<std::pair<double, double>> items;
  items.reserve(values.size());
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    items.emplace_back(values[k], weights[k]);
    total += weights[k];
  }
  double target = 0.5 * total;

  auto first = items.begin();
  auto last = items.end();
  for (;;) {
    // Three-way partition around the middle element.
    const double pivot = (first + (last - first) / 2)->first;
    auto lt = std::partition(first, last,
                             [&](const auto& it) { return it.first < pivot; });
    auto gt = std::partition(lt, last,
                             [&](const auto& it) { return it.first == pivot; });
    double w_less = 0.0, w_equal = 0.0;
    for (auto it = first; it != lt; ++it) w_less += it->second;
    for (auto it = lt; it != gt; ++it) w_equal += it->second;

    if (lt != first && w_less >= target) {
      last = lt;
    } else if (w_less + w_equal >= target || gt == last) {
      return pivot;
    } else {
      target -= w_less + w_equal;
      first = gt;
    }
  }
}

PopulationParams weighted_median(const OuterEnsemble& e) {
  std::vector<double> mu(e.size()), w2(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    mu[k] = e.particles[k].mu_cl;
    w2[k] = e.particles[k].omega2_cl;
  }
  return {weighted_median(mu, e.weights), weighted_median(w2, e.weights)};
}

WeightedMoments weighted_moments(std::span<const PopulationParams> particles,
                                 std::span<const double> weights) {
  double total = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    total += w;
    mx += w * particles[k].mu_cl;
    my += w * particles[k].omega2_cl;
  }
  mx /= total;
  my /= total;
  double vx = 0.0, vy = 0.0;
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    vx += w * (particles[k].mu_cl - mx) * (particles[k].mu_cl - mx);
    vy += w * (particles[k].omega2_cl - my) * (particles[k].omega2_cl - my);
  }
  return {{mx, my}, {std::sqrt(vx / total), std::sqrt(vy / total)}};
}

}  // namespace hbpk
