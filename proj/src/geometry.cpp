#include "csas/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace csas {

Eigen::VectorXd SceneGrid::coords() const {
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c[i] = coord(i);
  return c;
}

SceneGrid build_grid(int n, double extent, double z0) {
  require(n >= 2, "build_grid: need at least two pixels per side");
  require(extent > 0.0, "build_grid: extent must be positive");
  return SceneGrid{n, extent, z0, 0.0};
}

SceneGrid kernel_grid(const SceneGrid& grid) {
  SceneGrid k = grid;
  k.shift = 0.0;
  k.shift = -k.coord(grid.n / 2);
  return k;
}

double TransducerRing::spacing() const {
  return angles.empty() ? 0.0 : 2.0 * std::numbers::pi / static_cast<double>(angles.size());
}

Eigen::Vector3d TransducerRing::position(std::size_t i) const {
  const double a = angles.at(i);
  return {radius * std::cos(a), radius * std::sin(a), height};
}

TransducerRing build_ring(double radius, double height, int n_angles) {
  require(n_angles >= 1, "build_ring: need at least one angle");
  require(radius > 0.0, "build_ring: radius must be positive");
  TransducerRing ring{radius, height, {}};
  ring.angles.resize(n_angles);
  for (int i = 0; i < n_angles; ++i) ring.angles[i] = 2.0 * std::numbers::pi * i / n_angles;
  return ring;
}

SamplingCheck check_sampling(const TransducerRing& ring, double lambda_min, double r_scene) {
  require(lambda_min > 0.0 && r_scene > 0.0, "check_sampling: lambda_min and r_scene must be positive");
  SamplingCheck out;
  out.max_dtheta = lambda_min / (4.0 * r_scene);
  out.dtheta = ring.spacing();
  // Inclusive, with one rounding step of slack so that an exactly matched ring passes.
  out.satisfied = out.dtheta <= out.max_dtheta * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
  return out;
}

}  // namespace csas
