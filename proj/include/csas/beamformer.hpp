#pragma once

#include <Eigen/Core>

#include "csas/core.hpp"
#include "csas/geometry.hpp"
#include "csas/signal.hpp"
#include "csas/simulator.hpp"

namespace csas {

struct ComplexImage {
  CImage data;
  SceneGrid grid;
};

/// Matched-filtered analytic pings, one row per ring angle.
struct AnalyticPingSet {
  Eigen::MatrixXcd pings;
  double fs = 0.0;
  double t0 = 0.0;
  TransducerRing ring;
};

/// Matched filter followed by the analytic signal, row by row.
AnalyticPingSet prepare_pings(const PingSet& raw, const Waveform& w);

struct DasOptions {
  /// Band-limited upsampling applied to each analytic row before the linear
  /// sub-sample interpolation. 1 disables it.
  int upsample = 8;
};

/// Delay-and-sum: I(x, y) = sum over angles of S_A(2 |T - (x, y, z0)| / c).
/// Delays falling outside the record contribute zero. Angles are summed in
/// ascending order for every pixel.
ComplexImage das(const AnalyticPingSet& pings, const SceneGrid& grid, double c, const DasOptions& opts = {});

/// 20 log10(|I| / max|I|) clipped below at floor_db.
RealImage log_magnitude(const CImage& img, double floor_db);

}  // namespace csas
