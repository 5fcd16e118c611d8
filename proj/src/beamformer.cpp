#include "csas/beamformer.hpp"

#include <cmath>

#include "csas/parallel.hpp"

namespace csas {

AnalyticPingSet prepare_pings(const PingSet& raw, const Waveform& w) {
  require(raw.fs == w.fs, "prepare_pings: sample-rate mismatch between pings and waveform");
  AnalyticPingSet out;
  out.fs = raw.fs;
  out.t0 = raw.t0;
  out.ring = raw.ring;
  out.pings.resize(raw.pings.rows(), raw.pings.cols());
  parallel_for(static_cast<std::size_t>(raw.pings.rows()), [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd row = raw.pings.row(r).transpose();
    out.pings.row(r) = analytic_signal(match_filter(row, w.samples)).transpose();
  });
  return out;
}

ComplexImage das(const AnalyticPingSet& pings, const SceneGrid& grid, double c, const DasOptions& opts) {
  require(pings.pings.rows() > 0 && pings.pings.cols() > 0, "das: empty ping set");
  require(static_cast<std::size_t>(pings.pings.rows()) == pings.ring.size(), "das: one ping row per ring angle required");
  require(c > 0.0, "das: sound speed must be positive");
  require(opts.upsample >= 1, "das: upsample factor must be >= 1");

  const Eigen::Index n_angles = pings.pings.rows();
  Eigen::MatrixXcd rows(n_angles, pings.pings.cols() * opts.upsample);
  for (Eigen::Index a = 0; a < n_angles; ++a)
    rows.row(a) = upsample(pings.pings.row(a).transpose(), opts.upsample).transpose();
  const double fs = pings.fs * opts.upsample;
  const Eigen::Index len = rows.cols();

  std::vector<Eigen::Vector3d> tx(n_angles);
  for (Eigen::Index a = 0; a < n_angles; ++a) tx[a] = pings.ring.position(static_cast<std::size_t>(a));

  ComplexImage out{CImage::Zero(grid.n, grid.n), grid};
  parallel_for(static_cast<std::size_t>(grid.n), [&](std::size_t ri) {
    const int r = static_cast<int>(ri);
    for (int col = 0; col < grid.n; ++col) {
      const Eigen::Vector3d p = grid.position(r, col);
      cdouble acc{0.0, 0.0};
      for (Eigen::Index a = 0; a < n_angles; ++a) {
        const double pos = (2.0 * (tx[a] - p).norm() / c - pings.t0) * fs;
        const double fl = std::floor(pos);
        const auto i = static_cast<Eigen::Index>(fl);
        if (i < 0 || i >= len) continue;
        const double frac = pos - fl;
        if (i == len - 1) {
          if (frac == 0.0) acc += rows(a, i);
          continue;
        }
        acc += (1.0 - frac) * rows(a, i) + frac * rows(a, i + 1);
      }
      out.data(r, col) = acc;
    }
  });
  return out;
}

RealImage log_magnitude(const CImage& img, double floor_db) {
  require(floor_db < 0.0, "log_magnitude: floor must be negative");
  const RealImage mag = img.cwiseAbs();
  const double peak = mag.size() ? mag.maxCoeff() : 0.0;
  RealImage out(img.rows(), img.cols());
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    const double db = peak > 0.0 && mag(i) > 0.0 ? 20.0 * std::log10(mag(i) / peak) : floor_db;
    out(i) = std::max(db, floor_db);
  }
  return out;
}

}  // namespace csas
