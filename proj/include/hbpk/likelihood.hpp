#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hbpk {

/// Observation model p(y_i | theta) for one individual, with the data bound
/// in. Every inference algorithm only ever sees this interface, so the PK
/// model can be swapped for a closed-form model in tests.
class IndividualLikelihood {
 public:
  virtual ~IndividualLikelihood() = default;

  [[nodiscard]] virtual std::size_t num_observations() const = 0;

  /// log p(y_i | theta), all observations.
  [[nodiscard]] virtual double log_likelihood(double theta) const = 0;

  /// log p(y_ij | theta) for observation j alone.
  [[nodiscard]] virtual double log_likelihood_at(double theta,
                                                 std::size_t j) const = 0;

  /// Batched form of log_likelihood; out.size() == thetas.size().
  virtual void log_likelihood(std::span<const double> thetas,
                              std::span<double> out) const;
};

using IndividualData = std::shared_ptr<const IndividualLikelihood>;
using Dataset = std::vector<IndividualData>;

/// y ~ N(theta, s^2) per observation. Conjugate to the normal IIV model,
/// which makes exact posteriors available for checking the algorithms.
class GaussianLikelihood final : public IndividualLikelihood {
 public:
  GaussianLikelihood(std::vector<double> values, double sd);

  [[nodiscard]] std::size_t num_observations() const override {
    return values_.size();
  }
  [[nodiscard]] double log_likelihood(double theta) const override;
  [[nodiscard]] double log_likelihood_at(double theta,
                                         std::size_t j) const override;
  void log_likelihood(std::span<const double> thetas,
                      std::span<double> out) const override;

  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] double sd() const { return sd_; }

 private:
  std::vector<double> values_;
  double sd_;
  double log_norm_;  // -log(sd * sqrt(2 pi))
};

}  // namespace hbpk
