// Compiled with -O3 -ffast-math (see src/CMakeLists.txt) so these loops
// auto-vectorize. The exponentials are written out inline because a libm
// call in the loop body would block that.
#include "kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
#define HBPK_CLONES __attribute__((target_clones("avx512f", "avx2", "default")))
#else
#define HBPK_CLONES
#endif

namespace hbpk::detail {

namespace {

// x = k ln2 + r with |r| <= ln2/2; degree-6 Taylor in r is exact to float
// rounding. Valid for x in [-87, 0].
inline float exp_f32(float x) {
  const float k = __builtin_roundf(x * 1.44269504f);
  const float r = (x - k * 0.693145752f) - k * 1.42860677e-06f;
  float p = 1.0f / 720.0f;
  p = p * r + 1.0f / 120.0f;
  p = p * r + 1.0f / 24.0f;
  p = p * r + 1.0f / 6.0f;
  p = p * r + 0.5f;
  p = p * r + 1.0f;
  p = p * r + 1.0f;
  const auto bits = static_cast<std::uint32_t>(static_cast<std::int32_t>(k) + 127) << 23;
  return p * std::bit_cast<float>(bits);
}

// Same reduction in double with a degree-12 polynomial. Valid for x in [-700, 0].
inline double exp_f64(double x) {
  const double k = __builtin_round(x * 1.4426950408889634);
  const double r = (x - k * 0.6931471803691238) - k * 1.9082149292705877e-10;
  double p = 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const auto bits = static_cast<std::uint64_t>(static_cast<std::int32_t>(k) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

}  // namespace

HBPK_CLONES
double sum_exp_quadratic_f32(const float* __restrict base, const float* __restrict theta,
                             std::size_t n, float mu, float inv_two_var) {
  float sum = 0.0f;
  for (std::size_t s = 0; s < n; ++s) {
    const float d = theta[s] - mu;
    const float x = base[s] - d * d * inv_two_var;
    const float e = exp_f32(std::max(x, -87.0f));
    sum += x < -87.0f ? 0.0f : e;
  }
  return static_cast<double>(sum);
}

HBPK_CLONES
double log_sum_exp_quadratic(const double* __restrict base, const double* __restrict theta,
                             std::size_t n, double mu, double inv_two_var) {
  double m = -1e308;
  for (std::size_t s = 0; s < n; ++s) {
    const double d = theta[s] - mu;
    m = std::max(m, base[s] - d * d * inv_two_var);
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double d = theta[s] - mu;
    const double x = base[s] - d * d * inv_two_var - m;
    const double e = exp_f64(std::max(x, -700.0));
    sum += x < -700.0 ? 0.0 : e;
  }
  return m + std::log(sum);
}

}  // namespace hbpk::detail
