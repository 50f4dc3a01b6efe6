#pragma once

#include <span>
#include <vector>

#include "hbpk/pkmodel.hpp"
#include "hbpk/rng.hpp"

namespace hbpk {

/// Population hyperparameters: mean and variance of log-clearance.
struct PopulationParams {
  double mu_cl = 0.0;
  double omega2_cl = 1.0;

  friend bool operator==(const PopulationParams&,
                         const PopulationParams&) = default;
};

/// Normal-inverse-gamma hyperparameters:
///   omega2 ~ InvGamma(alpha0, beta0),  mu | omega2 ~ N(mu0, omega2 / kappa0).
struct NIGParams {
  double mu0 = 0.0;
  double kappa0 = 1.0;
  double alpha0 = 1.0;
  double beta0 = 1.0;

  void validate() const;

  /// (mu0, beta0 / (alpha0 - 1)); requires alpha0 > 1.
  [[nodiscard]] PopulationParams mean() const;

  friend bool operator==(const NIGParams&, const NIGParams&) = default;
};

/// Analytic first and second moments of the NIG marginals.
struct NigMoments {
  double mean_mu;
  double var_mu;
  double mean_omega2;
  double var_omega2;
};

/// Requires alpha0 > 2.
NigMoments nig_moments(const NIGParams& h);

double normal_log_pdf(double x, double mean, double variance);
double lognormal_log_pdf(double y, double log_location, double scale);
double inverse_gamma_log_pdf(double x, double shape, double rate);

/// log p(theta | zeta) for the IIV model theta ~ N(mu_cl, omega2_cl).
inline double iiv_log_pdf(double theta, const PopulationParams& zeta) {
  return normal_log_pdf(theta, zeta.mu_cl, zeta.omega2_cl);
}

/// Joint NIG log-density; -inf outside the support (omega2 <= 0).
double nig_log_pdf(const NIGParams& h, const PopulationParams& zeta);

PopulationParams nig_sample(const NIGParams& h, Engine& rng);

/// Posterior hyperparameters after observing one theta ~ N(mu, omega2).
NIGParams nig_conjugate_update(const NIGParams& h, IndividualParams theta);

/// Batch update with n observations (sufficient statistics form).
NIGParams nig_conjugate_update(const NIGParams& h, std::span<const double> thetas);

/// Moment-matched NIG. Solves alpha from the omega2 moments, then beta,
/// kappa from Var[mu] and mu0 from E[mu]. Throws DegeneracyError when a
/// variance is zero, or ConfigError on fewer than 4 samples.
NIGParams nig_fit_moments(std::span<const PopulationParams> samples);

}  // namespace hbpk
