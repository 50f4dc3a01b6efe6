#include "hbpk/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hbpk/errors.hpp"

namespace hbpk {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}  // namespace

void NIGParams::validate() const {
  if (!std::isfinite(mu0)) throw ConfigError("NIGParams: mu0 must be finite");
  if (!(kappa0 > 0.0)) throw ConfigError("NIGParams: kappa0 must be > 0");
  if (!(alpha0 > 0.0)) throw ConfigError("NIGParams: alpha0 must be > 0");
  if (!(beta0 > 0.0)) throw ConfigError("NIGParams: beta0 must be > 0");
}

PopulationParams NIGParams::mean() const {
  if (!(alpha0 > 1.0)) {
    throw ConfigError("NIGParams: mean of omega2 needs alpha0 > 1");
  }
  return {mu0, beta0 / (alpha0 - 1.0)};
}

NigMoments nig_moments(const NIGParams& h) {
  if (!(h.alpha0 > 2.0)) {
    throw ConfigError("NIGParams: variance of omega2 needs alpha0 > 2");
  }
  const double am1 = h.alpha0 - 1.0;
  const double mean_omega2 = h.beta0 / am1;
  return {h.mu0, mean_omega2 / h.kappa0, mean_omega2,
          mean_omega2 * mean_omega2 / (h.alpha0 - 2.0)};
}

double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -kHalfLog2Pi - 0.5 * std::log(variance) - 0.5 * d * d / variance;
}

double lognormal_log_pdf(double y, double log_location, double scale) {
  if (!(y > 0.0)) return kNegInf;
  const double log_y = std::log(y);
  return normal_log_pdf(log_y, log_location, scale * scale) - log_y;
}

double inverse_gamma_log_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}

double nig_log_pdf(const NIGParams& h, const PopulationParams& zeta) {
  if (!(zeta.omega2_cl > 0.0)) return kNegInf;
  return normal_log_pdf(zeta.mu_cl, h.mu0, zeta.omega2_cl / h.kappa0) +
         inverse_gamma_log_pdf(zeta.omega2_cl, h.alpha0, h.beta0);
}

PopulationParams nig_sample(const NIGParams& h, Engine& rng) {
  std::gamma_distribution<double> precision(h.alpha0, 1.0 / h.beta0);
  std::normal_distribution<double> z;
  const double omega2 = 1.0 / precision(rng);
  return {h.mu0 + std::sqrt(omega2 / h.kappa0) * z(rng), omega2};
}

NIGParams nig_conjugate_update(const NIGParams& h, IndividualParams theta) {
  const double k1 = h.kappa0 + 1.0;
  const double d = theta.theta - h.mu0;
  return {(h.kappa0 * h.mu0 + theta.theta) / k1, k1, h.alpha0 + 0.5,
          h.beta0 + h.kappa0 * d * d / (2.0 * k1)};
}

NIGParams nig_conjugate_update(const NIGParams& h,
                               std::span<const double> thetas) {
  const auto n = static_cast<double>(thetas.size());
  if (thetas.empty()) return h;
  double mean = 0.0;
  for (double t : thetas) mean += t;
  mean /= n;
  double ss = 0.0;
  for (double t : thetas) ss += (t - mean) * (t - mean);
  const double kn = h.kappa0 + n;
  const double d = mean - h.mu0;
  return {(h.kappa0 * h.mu0 + n * mean) / kn, kn, h.alpha0 + 0.5 * n,
          h.beta0 + 0.5 * ss + h.kappa0 * n * d * d / (2.0 * kn)};
}

NIGParams nig_fit_moments(std::span<const PopulationParams> samples) {
  if (samples.size() < 4) {
    throw ConfigError("nig_fit_moments: need at least 4 samples");
  }
  const auto n = static_cast<double>(samples.size());
  double mean_mu = 0.0, mean_w = 0.0;
  for (const auto& s : samples) {
    mean_mu += s.mu_cl;
    mean_w += s.omega2_cl;
  }
  mean_mu /= n;
  mean_w /= n;
  double var_mu = 0.0, var_w = 0.0;
  for (const auto& s : samples) {
    var_mu += (s.mu_cl - mean_mu) * (s.mu_cl - mean_mu);
    var_w += (s.omega2_cl - mean_w) * (s.omega2_cl - mean_w);
  }
  var_mu /= n - 1.0;
  var_w /= n - 1.0;

  // Identical values leave only rounding noise in the variance.
  auto degenerate = [](double var, double mean) { return !(var > 1e-24 * (1.0 + mean * mean)); };
  if (degenerate(var_w, mean_w) || degenerate(var_mu, mean_mu)) {
    throw DegeneracyError(
        "nig_fit_moments: zero sample variance (moment-matched alpha is "
        "unbounded)");
  }
  if (!(mean_w > 0.0)) {
    throw DegeneracyError("nig_fit_moments: non-positive mean of omega2");
  }
  // Var[w] (alpha - 2) = E[w]^2
  const double alpha = 2.0 + mean_w * mean_w / var_w;
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    throw DegeneracyError(
        "nig_fit_moments: moment-matched alpha <= 2 (variance undefined)");
  }
  const double beta = mean_w * (alpha - 1.0);
  // Var[mu] = beta / (kappa (alpha - 1)) = E[w] / kappa
  const double kappa = mean_w / var_mu;
  return {mean_mu, kappa, alpha, beta};
}

}  // namespace hbpk
