#include "hbpk/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "hbpk/errors.hpp"

namespace hbpk {

void IndividualLikelihood::log_likelihood(std::span<const double> thetas,
                                          std::span<double> out) const {
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    out[k] = log_likelihood(thetas[k]);
  }
}

GaussianLikelihood::GaussianLikelihood(std::vector<double> values, double sd)
    : values_(std::move(values)), sd_(sd) {
  if (values_.empty()) throw ConfigError("GaussianLikelihood: no observations");
  if (!(sd_ > 0.0)) throw ConfigError("GaussianLikelihood: sd must be > 0");
  log_norm_ = -std::log(sd_) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double GaussianLikelihood::log_likelihood_at(double theta,
                                             std::size_t j) const {
  const double z = (values_[j] - theta) / sd_;
  return log_norm_ - 0.5 * z * z;
}

double GaussianLikelihood::log_likelihood(double theta) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    sum += log_likelihood_at(theta, j);
  }
  return sum;
}

void GaussianLikelihood::log_likelihood(std::span<const double> thetas,
                                        std::span<double> out) const {
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    out[k] = log_likelihood(thetas[k]);
  }
}

}  // namespace hbpk
