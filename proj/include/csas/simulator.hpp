#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "csas/core.hpp"
#include "csas/geometry.hpp"
#include "csas/signal.hpp"

namespace csas {

/// Ground-truth scene: non-negative scattering coefficients with an optional
/// per-scatterer carrier phase (radians).
struct ScatterScene {
  SceneGrid grid;
  RealImage sigma;
  std::optional<RealImage> phase;

  /// sigma * exp(j phase), the complex reflectivity seen by the pipeline.
  CImage reflectivity() const;
};

ScatterScene make_scene(const SceneGrid& grid, RealImage sigma, std::optional<RealImage> phase = {});

struct PointScatterer {
  Eigen::Vector3d position;
  cdouble amplitude{1.0, 0.0};  // magnitude scales the echo, argument rotates its carrier
};

/// Raw per-angle measurements. Row i belongs to ring angle i; sample j is at t0 + j/fs.
struct PingSet {
  Eigen::MatrixXd pings;
  double fs = 0.0;
  double t0 = 0.0;
  TransducerRing ring;
};

struct TimeWindow {
  double t0 = 0.0;
  Eigen::Index samples = 0;
};

/// Receive window covering every two-way echo from points within horizontal
/// radius `reach` of the axis and heights in [z_lo, z_hi], with one pulse
/// length of margin on both sides. t0 is a whole number of sample periods.
TimeWindow echo_window(const TransducerRing& ring, const Waveform& w, double c, double reach, double z_lo,
                       double z_hi);

/// Window used for every scene on `grid`.
TimeWindow echo_window(const SceneGrid& grid, const TransducerRing& ring, const Waveform& w, double c);

/// Point-scattering forward model. Each echo is the pulse delayed by the
/// two-way travel time, realised exactly in the frequency domain, with the
/// scatterer phase applied as a rotation of the analytic carrier. Gaussian
/// noise of variance noise_eta is added per sample; the stream of angle i is
/// seeded from (seed, i) so the result is independent of scheduling.
PingSet simulate_points(const std::vector<PointScatterer>& points, const TransducerRing& ring, const Waveform& w,
                        double c, const TimeWindow& window, double noise_eta = 0.0, std::uint64_t seed = 0);

PingSet simulate(const ScatterScene& scene, const TransducerRing& ring, const Waveform& w, double c,
                 double noise_eta = 0.0, std::uint64_t seed = 0);

/// Phase 0 on the top-right and bottom-left quadrants, pi/2 on the other two.
ScatterScene apply_phase_quadrants(const ScatterScene& scene);

/// I.i.d. uniform phase in [0, 2pi) per pixel.
ScatterScene apply_random_phase(const ScatterScene& scene, std::uint64_t seed);

/// Noise variance giving the requested PSNR for unit-peak signals, 10^(-psnr/10).
/// +inf maps to zero.
double noise_variance_for_psnr(double psnr_db);

/// Stateless 64-bit mixer used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace csas
