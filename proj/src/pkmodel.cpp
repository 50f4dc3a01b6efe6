#include "hbpk/pkmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hbpk/errors.hpp"

namespace hbpk {

namespace {

// exp(700) is finite; anything larger only makes the prediction "zero".
constexpr double kMaxLogClearance = 700.0;

double clamp_log_density(double v) {
  return std::max(v, std::numeric_limits<double>::lowest());
}

}  // namespace

void PkConstants::validate() const {
  if (!(dose > 0.0) || !std::isfinite(dose)) {
    throw ConfigError("PkConstants: dose must be > 0");
  }
  if (!(volume > 0.0) || !std::isfinite(volume)) {
    throw ConfigError("PkConstants: volume must be > 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("PkConstants: sigma must be > 0");
  }
  if (!(sigma * sigma >= std::numeric_limits<double>::min())) {
    throw ConfigError("PkConstants: sigma too small (sigma^2 underflows)");
  }
}

void ObservationSet::validate() const {
  if (times.empty()) throw ConfigError("ObservationSet: no observations");
  if (times.size() != values.size()) {
    throw ConfigError("ObservationSet: times/values length mismatch");
  }
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0) || !std::isfinite(times[j])) {
      throw ConfigError("ObservationSet: time must be finite and >= 0");
    }
    if (j > 0 && !(times[j] > times[j - 1])) {
      throw ConfigError("ObservationSet: times must be strictly increasing");
    }
    if (!(values[j] > 0.0) || !std::isfinite(values[j])) {
      throw ConfigError("ObservationSet: concentration at t=" +
                        std::to_string(times[j]) + " must be > 0");
    }
  }
}

double log_concentration(const PkConstants& pk, IndividualParams p, double t) {
  if (t == 0.0) return std::log(pk.dose / pk.volume);
  const double clearance = std::exp(std::min(p.theta, kMaxLogClearance));
  return std::log(pk.dose / pk.volume) - clearance * t / pk.volume;
}

double concentration(const PkConstants& pk, IndividualParams p, double t) {
  return std::exp(log_concentration(pk, p, t));
}

double log_likelihood(const PkConstants& pk, IndividualParams p,
                      const ObservationSet& obs) {
  const double log_norm =
      -std::log(pk.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  double sum = 0.0;
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const double log_y = std::log(obs.values[j]);
    const double z = (log_y - log_concentration(pk, p, obs.times[j])) / pk.sigma;
    sum += log_norm - 0.5 * z * z - log_y;
  }
  return clamp_log_density(sum);
}

PkLikelihood::PkLikelihood(PkConstants pk, ObservationSet obs)
    : pk_(pk), obs_(std::move(obs)) {
  pk_.validate();
  obs_.validate();
  const double log_dv = std::log(pk_.dose / pk_.volume);
  const double log_norm =
      -std::log(pk_.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  offset_.reserve(obs_.size());
  rate_time_.reserve(obs_.size());
  const_term_ = 0.0;
  for (std::size_t j = 0; j < obs_.size(); ++j) {
    const double log_y = std::log(obs_.values[j]);
    offset_.push_back(log_y - log_dv);
    rate_time_.push_back(obs_.times[j] / pk_.volume);
    const_term_ += log_norm - log_y;
  }
  inv_two_var_ = 0.5 / (pk_.sigma * pk_.sigma);
}

double PkLikelihood::log_likelihood_at(double theta, std::size_t j) const {
  const double clearance = std::exp(std::min(theta, kMaxLogClearance));
  const double r =
      rate_time_[j] == 0.0 ? offset_[j] : offset_[j] + clearance * rate_time_[j];
  const double log_norm =
      -std::log(pk_.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  return clamp_log_density(log_norm - std::log(obs_.values[j]) -
                           r * r * inv_two_var_);
}

double PkLikelihood::log_likelihood(double theta) const {
  const double clearance = std::exp(std::min(theta, kMaxLogClearance));
  double ss = 0.0;
  for (std::size_t j = 0; j < offset_.size(); ++j) {
    const double r = rate_time_[j] == 0.0
                         ? offset_[j]
                         : offset_[j] + clearance * rate_time_[j];
    ss += r * r;
  }
  return clamp_log_density(const_term_ - ss * inv_two_var_);
}

void PkLikelihood::log_likelihood(std::span<const double> thetas,
                                  std::span<double> out) const {
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    out[k] = log_likelihood(thetas[k]);
  }
}

}  // namespace hbpk
