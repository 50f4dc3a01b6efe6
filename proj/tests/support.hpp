// Reference computations shared by the unit tests and the acceptance binary.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "hbpk/distributions.hpp"

namespace hbpk::test {

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample SD with n - 1 in the denominator.
inline double sd_of(std::span<const double> x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic critical value of the KS statistic at the 1% level.
inline double ks_critical_1pct(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

/// CDF tabulated by trapezoidal integration of a log-density on [lo, hi].
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& log_density, double lo, double hi,
               std::size_t n = 200000)
      : lo_(lo), step_((hi - lo) / static_cast<double>(n)), cdf_(n + 1, 0.0) {
    double prev = std::exp(log_density(lo));
    for (std::size_t i = 1; i <= n; ++i) {
      const double cur = std::exp(log_density(lo + step_ * static_cast<double>(i)));
      cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * step_;
      prev = cur;
    }
    total_ = cdf_.back();
  }
  double operator()(double x) const {
    const double u = (x - lo_) / step_;
    if (u <= 0.0) return 0.0;
    if (u >= static_cast<double>(cdf_.size() - 1)) return 1.0;
    const auto i = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i);
    return ((1.0 - f) * cdf_[i] + f * cdf_[i + 1]) / total_;
  }
  [[nodiscard]] double total() const { return total_; }

 private:
  double lo_, step_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

struct PosteriorSummary {
  PopulationParams mean;
  PopulationParams sd;
};

/// Exact posterior moments of (mu, omega2) for theta_i ~ N(mu, omega2),
/// y_i ~ N(theta_i, s^2), one observation per individual, under an NIG
/// prior. theta integrates out to y_i ~ N(mu, omega2 + s^2), which is not
/// conjugate, so the moments come from quadrature on an adaptive box.
inline PosteriorSummary gaussian_observation_posterior(const NIGParams& prior,
                                                       std::span<const double> y, double s) {
  auto log_post = [&](double mu, double w) {
    double lp = nig_log_pdf(prior, {mu, w});
    for (double v : y) lp += normal_log_pdf(v, mu, w + s * s);
    return lp;
  };
  auto moments = [&](double mu_lo, double mu_hi, double w_lo, double w_hi, std::size_t n) {
    const double dm = (mu_hi - mu_lo) / static_cast<double>(n);
    const double dw = (w_hi - w_lo) / static_cast<double>(n);
    std::vector<double> lp(n * n);
    double mx = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        lp[i * n + j] = log_post(mu_lo + (i + 0.5) * dm, w_lo + (j + 0.5) * dw);
        mx = std::max(mx, lp[i * n + j]);
      }
    }
    double z = 0, m1 = 0, m2 = 0, w1 = 0, w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = mu_lo + (i + 0.5) * dm;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = w_lo + (j + 0.5) * dw;
        const double p = std::exp(lp[i * n + j] - mx);
        z += p;
        m1 += p * mu;
        m2 += p * mu * mu;
        w1 += p * w;
        w2 += p * w * w;
      }
    }
    PosteriorSummary out;
    out.mean = {m1 / z, w1 / z};
    out.sd = {std::sqrt(std::max(m2 / z - out.mean.mu_cl * out.mean.mu_cl, 0.0)),
              std::sqrt(std::max(w2 / z - out.mean.omega2_cl * out.mean.omega2_cl, 0.0))};
    return out;
  };
  // Coarse pass locates the mass; the fine pass spans +-12 SD around it.
  const double ybar = mean_of(y);
  const PosteriorSummary coarse = moments(ybar - 5.0, ybar + 5.0, 1e-6, 10.0, 600);
  const double w_lo = std::max(1e-9, coarse.mean.omega2_cl - 12.0 * coarse.sd.omega2_cl);
  return moments(coarse.mean.mu_cl - 12.0 * coarse.sd.mu_cl,
                 coarse.mean.mu_cl + 12.0 * coarse.sd.mu_cl, w_lo,
                 coarse.mean.omega2_cl + 12.0 * coarse.sd.omega2_cl, 1200);
}

}  // namespace hbpk::test
