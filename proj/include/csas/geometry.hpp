#pragma once

#include <vector>

#include <Eigen/Core>

#include "csas/core.hpp"

namespace csas {

/// Square imaging grid on the plane z = z0. Pixel (row, col) sits at
/// (x, y) = (coord(col), coord(row)).
struct SceneGrid {
  int n = 0;
  double extent = 0.0;  // m, side length between first and last pixel centers
  double z0 = 0.0;
  double shift = 0.0;  // offset added to every coordinate; zero for scene grids

  double pitch() const { return extent / (n - 1); }
  double coord(int i) const { return -0.5 * extent + i * pitch() + shift; }
  Eigen::VectorXd coords() const;
  Eigen::Vector3d position(int row, int col) const { return {coord(col), coord(row), z0}; }

  bool operator==(const SceneGrid&) const = default;
};

SceneGrid build_grid(int n, double extent, double z0);

/// Grid of the same size and pitch whose pixel (n/2, n/2) lies exactly at the
/// origin. Identical to `grid` when n is odd.
SceneGrid kernel_grid(const SceneGrid& grid);

/// Transducers on a horizontal circle around the z axis.
struct TransducerRing {
  double radius = 0.0;
  double height = 0.0;
  std::vector<double> angles;  // rad, uniform over [0, 2pi)

  std::size_t size() const { return angles.size(); }
  double spacing() const;
  Eigen::Vector3d position(std::size_t i) const;

  bool operator==(const TransducerRing&) const = default;
};

TransducerRing build_ring(double radius, double height, int n_angles);

struct SamplingCheck {
  bool satisfied = false;
  double max_dtheta = 0.0;  // lambda_min / (4 r_scene)
  double dtheta = 0.0;      // the ring's spacing
};

/// Angular anti-aliasing bound dtheta <= lambda_min / (4 r_scene), inclusive.
SamplingCheck check_sampling(const TransducerRing& ring, double lambda_min, double r_scene);

}  // namespace csas
