#pragma once

#include <cstddef>

namespace hbpk::detail {

/// Single-precision sum_s exp(base[s] - (theta[s] - mu)^2 * inv_two_var).
/// Summands whose exponent is below -87 are dropped, so a result under
/// about 1e-30 has lost accuracy and should be recomputed exactly.
double sum_exp_quadratic_f32(const float* base, const float* theta,
                             std::size_t n, float mu, float inv_two_var);

/// log sum_s exp(base[s] - (theta[s] - mu)^2 * inv_two_var) in double,
/// shifted by the attained maximum. Inputs must be finite.
double log_sum_exp_quadratic(const double* base, const double* theta,
                             std::size_t n, double mu, double inv_two_var);

}  // namespace hbpk::detail
