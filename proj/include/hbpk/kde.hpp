#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hbpk/distributions.hpp"

namespace hbpk {

/// Regular grid over (mu_cl, omega2_cl); nx * ny cells, values stored
/// row-major as [ix * ny + iy].
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t nx = 200;
  double y_min = 0.0;
  double y_max = 1.0;
  std::size_t ny = 200;

  [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
  [[nodiscard]] double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
  [[nodiscard]] double cell_area() const { return dx() * dy(); }
  [[nodiscard]] double x_center(std::size_t ix) const {
    return x_min + (static_cast<double>(ix) + 0.5) * dx();
  }
  [[nodiscard]] double y_center(std::size_t iy) const {
    return y_min + (static_cast<double>(iy) + 0.5) * dy();
  }
  [[nodiscard]] std::size_t cells() const { return nx * ny; }
  /// Flat index of the cell holding p, if p lies on the grid.
  [[nodiscard]] std::optional<std::size_t> cell_of(const PopulationParams& p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Smallest grid containing both a and b, with the larger cell count per axis.
GridSpec grid_union(const GridSpec& a, const GridSpec& b);

/// Weighted 2-D product-Gaussian kernel density estimate.
class Kde2d {
 public:
  /// Silverman bandwidth per coordinate, using the Kish effective sample
  /// size of the weights. Empty weights means uniform.
  Kde2d(std::span<const PopulationParams> points, std::span<const double> weights);
  /// Explicit bandwidths (mu, omega2).
  Kde2d(std::span<const PopulationParams> points, std::span<const double> weights,
        std::pair<double, double> bandwidth);

  [[nodiscard]] double density(const PopulationParams& p) const;
  [[nodiscard]] std::vector<double> evaluate(const GridSpec& grid) const;
  /// n x n grid spanning the sample range padded by 3 bandwidths.
  [[nodiscard]] GridSpec default_grid(std::size_t n = 200) const;

  [[nodiscard]] std::pair<double, double> bandwidth() const { return {hx_, hy_}; }
  [[nodiscard]] double effective_sample_size() const { return ess_; }

 private:
  void init_points(std::span<const PopulationParams> points,
                   std::span<const double> weights);

  std::vector<double> xs_, ys_, ws_;
  double hx_ = 0.0, hy_ = 0.0, ess_ = 0.0;
};

/// Highest density region of a gridded density: cells with density at or
/// above the threshold at which the enclosed share of grid mass first
/// reaches `mass`.
struct HdrRegion {
  GridSpec grid;
  std::vector<std::uint8_t> mask;
  double threshold = 0.0;
  double mass = 0.0;  // enclosed share of total grid mass

  [[nodiscard]] std::size_t cell_count() const;
  [[nodiscard]] double area() const { return static_cast<double>(cell_count()) * grid.cell_area(); }
  [[nodiscard]] bool contains_cell(const PopulationParams& p) const;
};

HdrRegion highest_density_region(const Kde2d& kde, double mass, const GridSpec& grid);

/// KDE + HDR on the default 200 x 200 grid.
HdrRegion kde_hdr(std::span<const PopulationParams> points,
                  std::span<const double> weights, double mass);

/// |A and B| / |A or B| over cells; both regions must share a grid.
double jaccard_overlap(const HdrRegion& a, const HdrRegion& b);

}  // namespace hbpk
