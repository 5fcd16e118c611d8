#include "csas/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "csas/fft.hpp"
#include "csas/parallel.hpp"

namespace csas {

namespace {

constexpr Eigen::Index kBlock = 256;

// Frequency-domain sum over points of a_p exp(-j 2 pi k d_p / nfft) for
// k in [0, nfft/2], accumulated by a per-point phasor recurrence. Points are
// processed in cache-sized blocks so the inner update vectorises.
Eigen::VectorXcd delay_spectrum(const std::vector<cdouble>& amp, const std::vector<double>& delay_samples,
                                Eigen::Index nfft) {
  const Eigen::Index bins = nfft / 2 + 1;
  Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(bins);
  const auto count = static_cast<Eigen::Index>(amp.size());
  Eigen::ArrayXd zr, zi, sr, si, tmp;
  for (Eigen::Index start = 0; start < count; start += kBlock) {
    const Eigen::Index b = std::min(kBlock, count - start);
    zr.resize(b);
    zi.resize(b);
    sr.resize(b);
    si.resize(b);
    for (Eigen::Index j = 0; j < b; ++j) {
      const cdouble a = amp[start + j];
      const double arg = -2.0 * std::numbers::pi * delay_samples[start + j] / static_cast<double>(nfft);
      zr[j] = a.real();
      zi[j] = a.imag();
      sr[j] = std::cos(arg);
      si[j] = std::sin(arg);
    }
    for (Eigen::Index k = 0; k < bins; ++k) {
      spec[k] += cdouble(zr.sum(), zi.sum());
      tmp = zr * sr - zi * si;
      zi = zr * si + zi * sr;
      zr = tmp;
    }
  }
  return spec;
}

}  // namespace

CImage ScatterScene::reflectivity() const {
  CImage out = sigma.cast<cdouble>();
  if (phase) {
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = std::polar(sigma(r, c), (*phase)(r, c));
  }
  return out;
}

ScatterScene make_scene(const SceneGrid& grid, RealImage sigma, std::optional<RealImage> phase) {
  require(sigma.rows() == grid.n && sigma.cols() == grid.n, "make_scene: sigma shape does not match grid");
  require((sigma.array() >= 0.0).all(), "make_scene: scattering coefficients must be non-negative");
  if (phase)
    require(phase->rows() == grid.n && phase->cols() == grid.n, "make_scene: phase shape does not match sigma");
  return ScatterScene{grid, std::move(sigma), std::move(phase)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser applied to the pair.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

TimeWindow echo_window(const TransducerRing& ring, const Waveform& w, double c, double reach, double z_lo,
                       double z_hi) {
  require(c > 0.0, "echo_window: sound speed must be positive");
  const double v_near = (ring.height >= z_lo && ring.height <= z_hi)
                            ? 0.0
                            : std::min(std::abs(ring.height - z_lo), std::abs(ring.height - z_hi));
  const double v_far = std::max(std::abs(ring.height - z_lo), std::abs(ring.height - z_hi));
  const double h_near = std::max(ring.radius - reach, 0.0);
  const double r_min = std::hypot(h_near, v_near);
  const double r_max = std::hypot(ring.radius + reach, v_far);

  TimeWindow win;
  const double first = std::floor(w.fs * (2.0 * r_min / c - w.duration));
  win.t0 = first / w.fs;
  const double t_end = 2.0 * r_max / c + 2.0 * w.duration;
  win.samples = static_cast<Eigen::Index>(std::ceil((t_end - win.t0) * w.fs)) + 1;
  return win;
}

TimeWindow echo_window(const SceneGrid& grid, const TransducerRing& ring, const Waveform& w, double c) {
  const double half = std::max(std::abs(grid.coord(0)), std::abs(grid.coord(grid.n - 1)));
  return echo_window(ring, w, c, std::sqrt(2.0) * half, grid.z0, grid.z0);
}

PingSet simulate_points(const std::vector<PointScatterer>& points, const TransducerRing& ring, const Waveform& w,
                        double c, const TimeWindow& window, double noise_eta, std::uint64_t seed) {
  require(c > 0.0, "simulate: sound speed must be positive");
  require(noise_eta >= 0.0, "simulate: noise variance must be non-negative");
  require(ring.size() >= 1, "simulate: empty transducer ring");
  require(window.samples >= 1, "simulate: empty receive window");

  const Eigen::Index n_t = window.samples;
  const auto nfft = static_cast<Eigen::Index>(fft::next_pow2(n_t + w.samples.size()));

  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(nfft);
  padded.head(w.samples.size()) = w.samples.cast<cdouble>();
  const Eigen::VectorXcd pulse_spec = fft::forward<double>(padded);

  PingSet out;
  out.fs = w.fs;
  out.t0 = window.t0;
  out.ring = ring;
  out.pings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ring.size()), n_t);

  std::vector<cdouble> amp;
  amp.reserve(points.size());
  for (const auto& p : points)
    if (p.amplitude != cdouble(0.0, 0.0)) amp.push_back(p.amplitude);

  parallel_for(ring.size(), [&](std::size_t i) {
    const Eigen::Vector3d tx = ring.position(i);
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n_t);
    if (!amp.empty()) {
      std::vector<double> delay;
      delay.reserve(amp.size());
      for (const auto& p : points) {
        if (p.amplitude == cdouble(0.0, 0.0)) continue;
        const double tau = 2.0 * (tx - p.position).norm() / c;
        delay.push_back((tau - window.t0) * w.fs);
      }
      const Eigen::VectorXcd acc = delay_spectrum(amp, delay, nfft);
      Eigen::VectorXcd spec(nfft);
      const Eigen::Index half = nfft / 2;
      for (Eigen::Index k = 0; k <= half; ++k) spec[k] = pulse_spec[k] * acc[k];
      spec[0] = spec[0].real();
      spec[half] = spec[half].real();
      for (Eigen::Index k = 1; k < half; ++k) spec[nfft - k] = std::conj(spec[k]);
      row = fft::inverse<double>(spec).head(n_t).real();
    }
    if (noise_eta > 0.0) {
      std::mt19937_64 rng(mix_seed(seed, i));
      std::normal_distribution<double> gauss(0.0, std::sqrt(noise_eta));
      for (Eigen::Index j = 0; j < n_t; ++j) row[j] += gauss(rng);
    }
    out.pings.row(static_cast<Eigen::Index>(i)) = row.transpose();
  });
  return out;
}

PingSet simulate(const ScatterScene& scene, const TransducerRing& ring, const Waveform& w, double c,
                 double noise_eta, std::uint64_t seed) {
  const CImage refl = scene.reflectivity();
  std::vector<PointScatterer> points;
  for (int r = 0; r < scene.grid.n; ++r)
    for (int col = 0; col < scene.grid.n; ++col)
      if (scene.sigma(r, col) != 0.0) points.push_back({scene.grid.position(r, col), refl(r, col)});
  return simulate_points(points, ring, w, c, echo_window(scene.grid, ring, w, c), noise_eta, seed);
}

ScatterScene apply_phase_quadrants(const ScatterScene& scene) {
  const int n = scene.grid.n;
  require(scene.sigma.rows() == scene.sigma.cols(), "apply_phase_quadrants: scene must be square");
  const int h = n / 2;
  RealImage phase(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      const bool top = r < h, right = c >= h;
      phase(r, c) = (top == right) ? 0.0 : 0.5 * std::numbers::pi;
    }
  ScatterScene out = scene;
  out.phase = std::move(phase);
  return out;
}

ScatterScene apply_random_phase(const ScatterScene& scene, std::uint64_t seed) {
  const int n = scene.grid.n;
  std::mt19937_64 rng(mix_seed(seed, 0x5ce11e));
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
  RealImage phase(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) phase(r, c) = uni(rng);
  ScatterScene out = scene;
  out.phase = std::move(phase);
  return out;
}

double noise_variance_for_psnr(double psnr_db) {
  if (std::isinf(psnr_db) && psnr_db > 0) return 0.0;
  require(std::isfinite(psnr_db), "noise_variance_for_psnr: PSNR must be finite or +inf");
  return std::pow(10.0, -psnr_db / 10.0);
}

}  // namespace csas
