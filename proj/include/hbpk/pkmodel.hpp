#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hbpk/likelihood.hpp"

namespace hbpk {

/// Known constants of the one-compartment IV bolus model.
struct PkConstants {
  double dose = 100.0;   // umol
  double volume = 20.0;  // L
  double sigma = 0.1;    // residual SD on log-concentration scale

  void validate() const;
};

/// Per-individual log-clearance, log(L/h).
struct IndividualParams {
  double theta = 0.0;
};

/// Timestamped concentration measurements of one individual.
struct ObservationSet {
  std::vector<double> times;   // h, strictly increasing, >= 0
  std::vector<double> values;  // umol/L, > 0

  [[nodiscard]] std::size_t size() const { return times.size(); }
  void validate() const;
};

/// log C(t, theta); finite for any finite theta.
double log_concentration(const PkConstants& pk, IndividualParams p, double t);

/// C(t, theta) = D/V * exp(-exp(theta) * t / V).
double concentration(const PkConstants& pk, IndividualParams p, double t);

/// Sum over observations of the lognormal log-density of y_j around C(t_j).
double log_likelihood(const PkConstants& pk, IndividualParams p,
                      const ObservationSet& obs);

/// IndividualLikelihood for the PK model; precomputes the data-only terms.
class PkLikelihood final : public IndividualLikelihood {
 public:
  PkLikelihood(PkConstants pk, ObservationSet obs);

  [[nodiscard]] std::size_t num_observations() const override {
    return obs_.size();
  }
  [[nodiscard]] double log_likelihood(double theta) const override;
  [[nodiscard]] double log_likelihood_at(double theta,
                                         std::size_t j) const override;
  void log_likelihood(std::span<const double> thetas,
                      std::span<double> out) const override;

  [[nodiscard]] const PkConstants& constants() const { return pk_; }
  [[nodiscard]] const ObservationSet& observations() const { return obs_; }

 private:
  PkConstants pk_;
  ObservationSet obs_;
  // residual_j(theta) = log_y_j - log(D/V) + exp(theta) * t_j / V
  std::vector<double> offset_;     // log y_j - log(D/V)
  std::vector<double> rate_time_;  // t_j / V
  double const_term_ = 0.0;        // -n log(sigma sqrt(2 pi)) - sum log y_j
  double inv_two_var_ = 0.0;
};

}  // namespace hbpk
