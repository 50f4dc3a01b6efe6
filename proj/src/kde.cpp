#include "hbpk/kde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hbpk/errors.hpp"

namespace hbpk {

namespace {

constexpr std::size_t kBlock = 2048;

double gauss_kernel(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

std::optional<std::size_t> GridSpec::cell_of(const PopulationParams& p) const {
  if (!(p.mu_cl >= x_min && p.mu_cl < x_max && p.omega2_cl >= y_min &&
        p.omega2_cl < y_max)) {
    return std::nullopt;
  }
  auto ix = static_cast<std::size_t>((p.mu_cl - x_min) / dx());
  auto iy = static_cast<std::size_t>((p.omega2_cl - y_min) / dy());
  ix = std::min(ix, nx - 1);
  iy = std::min(iy, ny - 1);
  return ix * ny + iy;
}

GridSpec grid_union(const GridSpec& a, const GridSpec& b) {
  return {std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max),
          std::max(a.nx, b.nx),       std::min(a.y_min, b.y_min),
          std::max(a.y_max, b.y_max), std::max(a.ny, b.ny)};
}

void Kde2d::init_points(std::span<const PopulationParams> points,
                        std::span<const double> weights) {
  if (!weights.empty() && weights.size() != points.size()) {
    throw ConfigError("Kde2d: weights/points length mismatch");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("Kde2d: weights must be finite and >= 0");
    }
    if (w == 0.0) continue;
    xs_.push_back(points[k].mu_cl);
    ys_.push_back(points[k].omega2_cl);
    ws_.push_back(w);
    total += w;
  }
  if (ws_.empty() || !(total > 0.0)) {
    throw DegeneracyError("Kde2d: no sample carries positive weight");
  }
  double sum_sq = 0.0;
  for (double& w : ws_) {
    w /= total;
    sum_sq += w * w;
  }
  ess_ = 1.0 / sum_sq;
}

Kde2d::Kde2d(std::span<const PopulationParams> points,
             std::span<const double> weights) {
  init_points(points, weights);
  if (ess_ < 10.0) {
    throw DegeneracyError("Kde2d: fewer than 10 effective samples");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < ws_.size(); ++k) {
    mx += ws_[k] * xs_[k];
    my += ws_[k] * ys_[k];
  }
  double vx = 0.0, vy = 0.0;
  for (std::size_t k = 0; k < ws_.size(); ++k) {
    vx += ws_[k] * (xs_[k] - mx) * (xs_[k] - mx);
    vy += ws_[k] * (ys_[k] - my) * (ys_[k] - my);
  }
  // Identical values leave only rounding noise in the variance.
  auto degenerate = [](double var, double mean) { return !(var > 1e-24 * (1.0 + mean * mean)); };
  if (degenerate(vx, mx) || degenerate(vy, my)) {
    throw DegeneracyError("Kde2d: zero variance in a coordinate");
  }
  // Silverman, d = 2: h = sd * n^(-1/6)
  const double factor = std::pow(ess_, -1.0 / 6.0);
  hx_ = std::sqrt(vx) * factor;
  hy_ = std::sqrt(vy) * factor;
}

Kde2d::Kde2d(std::span<const PopulationParams> points,
             std::span<const double> weights, std::pair<double, double> bandwidth)
    : hx_(bandwidth.first), hy_(bandwidth.second) {
  if (!(hx_ > 0.0) || !(hy_ > 0.0)) {
    throw ConfigError("Kde2d: bandwidths must be > 0");
  }
  init_points(points, weights);
}

double Kde2d::density(const PopulationParams& p) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < ws_.size(); ++k) {
    sum += ws_[k] * gauss_kernel((p.mu_cl - xs_[k]) / hx_) *
           gauss_kernel((p.omega2_cl - ys_[k]) / hy_);
  }
  return sum / (hx_ * hy_);
}

std::vector<double> Kde2d::evaluate(const GridSpec& grid) const {
  // Separable kernel: D = Kx * diag(w) * Ky^T, accumulated in sample blocks.
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto nx = static_cast<Eigen::Index>(grid.nx);
  const auto ny = static_cast<Eigen::Index>(grid.ny);
  Matrix density = Matrix::Zero(nx, ny);
  for (std::size_t start = 0; start < ws_.size(); start += kBlock) {
    const std::size_t count = std::min(kBlock, ws_.size() - start);
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd kx(nx, n);
    Eigen::MatrixXd ky(ny, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const std::size_t s = start + static_cast<std::size_t>(k);
      for (Eigen::Index i = 0; i < nx; ++i) {
        kx(i, k) = ws_[s] *
                   gauss_kernel((grid.x_center(static_cast<std::size_t>(i)) - xs_[s]) / hx_);
      }
      for (Eigen::Index j = 0; j < ny; ++j) {
        ky(j, k) = gauss_kernel((grid.y_center(static_cast<std::size_t>(j)) - ys_[s]) / hy_);
      }
    }
    density.noalias() += kx * ky.transpose();
  }
  density /= hx_ * hy_;
  return {density.data(), density.data() + density.size()};
}

GridSpec Kde2d::default_grid(std::size_t n) const {
  const auto [xlo, xhi] = std::minmax_element(xs_.begin(), xs_.end());
  const auto [ylo, yhi] = std::minmax_element(ys_.begin(), ys_.end());
  return {*xlo - 3.0 * hx_, *xhi + 3.0 * hx_, n,
          *ylo - 3.0 * hy_, *yhi + 3.0 * hy_, n};
}

std::size_t HdrRegion::cell_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

bool HdrRegion::contains_cell(const PopulationParams& p) const {
  const auto cell = grid.cell_of(p);
  return cell && mask[*cell] != 0;
}

HdrRegion highest_density_region(const Kde2d& kde, double mass,
                                 const GridSpec& grid) {
  if (!(mass > 0.0 && mass < 1.0)) {
    throw ConfigError("highest_density_region: mass must lie in (0, 1)");
  }
  const std::vector<double> density = kde.evaluate(grid);
  std::vector<std::size_t> order(density.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });

  const double total = std::accumulate(density.begin(), density.end(), 0.0);
  if (!(total > 0.0)) {
    throw DegeneracyError("highest_density_region: density vanishes on grid");
  }
  HdrRegion region{grid, std::vector<std::uint8_t>(density.size(), 0), 0.0, 0.0};
  double enclosed = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double d = density[order[k]];
    // Cells tied with the threshold density are all included.
    if (enclosed >= mass * total && d < region.threshold) break;
    region.mask[order[k]] = 1;
    region.threshold = d;
    enclosed += d;
  }
  region.mass = enclosed / total;
  return region;
}

HdrRegion kde_hdr(std::span<const PopulationParams> points,
                  std::span<const double> weights, double mass) {
  const Kde2d kde(points, weights);
  return highest_density_region(kde, mass, kde.default_grid());
}

double jaccard_overlap(const HdrRegion& a, const HdrRegion& b) {
  if (!(a.grid == b.grid)) {
    throw ConfigError("jaccard_overlap: regions live on different grids");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t k = 0; k < a.mask.size(); ++k) {
    inter += (a.mask[k] && b.mask[k]) ? 1 : 0;
    uni += (a.mask[k] || b.mask[k]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace hbpk
