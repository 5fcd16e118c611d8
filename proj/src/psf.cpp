#include "csas/psf.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "csas/fft.hpp"
#include "csas/simulator.hpp"

namespace csas {

namespace {

Psf run_point_pipeline(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                       const Eigen::Vector3d& position, const DasOptions& opts) {
  const SceneGrid kg = kernel_grid(grid);
  const double half = std::max(std::abs(kg.coord(0)), std::abs(kg.coord(kg.n - 1)));
  const double reach = std::max(std::sqrt(2.0) * half, position.head<2>().norm());
  const TimeWindow win =
      echo_window(ring, w, c, reach, std::min(kg.z0, position.z()), std::max(kg.z0, position.z()));
  const PingSet raw = simulate_points({PointScatterer{position, {1.0, 0.0}}}, ring, w, c, win);
  Psf psf;
  psf.image = das(prepare_pings(raw, w), kg, c, opts);
  psf.f_start = w.f_start;
  psf.f_stop = w.f_stop;
  psf.center_row = kg.n / 2;
  psf.center_col = kg.n / 2;
  return psf;
}

// Linear crossing of `level` walking outward from `peak` along a 1-D profile.
double crossing(const Eigen::VectorXd& profile, Eigen::Index peak, double level, int dir) {
  Eigen::Index i = peak;
  while (true) {
    const Eigen::Index j = i + dir;
    if (j < 0 || j >= profile.size()) return static_cast<double>(i);
    if (profile[j] < level) {
      const double t = (profile[i] - level) / (profile[i] - profile[j]);
      return static_cast<double>(i) + dir * t;
    }
    i = j;
  }
}

}  // namespace

Psf simulate_psf(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                 const DasOptions& opts) {
  return run_point_pipeline(ring, grid, w, c, Eigen::Vector3d(0.0, 0.0, grid.z0), opts);
}

Psf simulate_offcenter_psf(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                           const Eigen::Vector3d& position, const DasOptions& opts) {
  require(position.head<2>().norm() < ring.radius, "simulate_offcenter_psf: position lies outside the ring");
  return run_point_pipeline(ring, grid, w, c, position, opts);
}

std::shared_ptr<const Psf> PsfCache::get(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w,
                                         double c, const DasOptions& opts) {
  std::ostringstream key;
  key << std::hexfloat << ring.radius << '|' << ring.height << '|' << ring.size() << '|' << grid.n << '|'
      << grid.extent << '|' << grid.z0 << '|' << grid.shift << '|' << w.fs << '|' << w.f_start << '|' << w.f_stop
      << '|' << w.duration << '|' << c << '|' << opts.upsample;
  for (double a : ring.angles) key << ',' << a;
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key.str()); it != entries_.end()) return it->second;
  }
  auto psf = std::make_shared<const Psf>(simulate_psf(ring, grid, w, c, opts));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key.str(), std::move(psf)).first->second;
}

std::size_t PsfCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

Psf normalized(const Psf& psf) {
  const double peak = psf.image.data.real().cwiseAbs().maxCoeff();
  require(peak > 0.0, "normalized: PSF has no real component");
  Psf out = psf;
  out.image.data /= peak;
  return out;
}

double centered_psf_spectrum(double rho, const AnalyticPsfParams& p) {
  require(p.a0 > 0.0 && p.k > 0.0, "centered_psf_spectrum: a0 and k must be positive");
  const double pi = std::numbers::pi;
  const double d = p.k - pi * rho;
  return pi * pi * std::sqrt(2.0) * (p.a0 * p.sigma_w / p.k) * std::exp(-2.0 * p.a0 * p.a0 * d * d);
}

cdouble general_psf_phase(double rho, double phi, double R, double theta0) {
  require(R >= 0.0, "general_psf_phase: R must be non-negative");
  return std::polar(1.0, 2.0 * std::numbers::pi * rho * R * std::cos(theta0 - phi));
}

cdouble general_psf_spectrum(double rho, double phi, double R, double theta0, const AnalyticPsfParams& params,
                             const AngularWeight& g) {
  const double weight = g ? g(phi + theta0 + 0.5 * std::numbers::pi) : 1.0;
  return centered_psf_spectrum(rho, params) * general_psf_phase(rho, phi, R, theta0) * weight;
}

AnalyticPsfParams fit_centered_psf_params(const Psf& psf) {
  const int n = psf.image.grid.n;
  const double pitch = psf.image.grid.pitch();
  const CImage spec = fft::fft2<double>(fft::ifftshift(psf.image.data));
  const double df = 1.0 / (n * pitch);

  const int bins = n;  // radial bins of width df
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins), count = Eigen::VectorXd::Zero(bins);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double rho = std::hypot(fft::signed_bin(r, n), fft::signed_bin(c, n));
      const auto b = static_cast<int>(std::lround(rho));
      if (b < bins) {
        sum[b] += std::abs(spec(r, c));
        count[b] += 1.0;
      }
    }
  double peak = 0.0;
  for (int b = 0; b < bins; ++b)
    if (count[b] > 0) peak = std::max(peak, sum[b] / count[b]);
  require(peak > 0.0, "fit_centered_psf_params: empty spectrum");

  std::vector<std::array<double, 3>> rows;
  std::vector<double> rhs, wts;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const double v = sum[b] / count[b];
    if (v < 0.01 * peak) continue;
    const double rho = b * df;
    rows.push_back({1.0, rho, rho * rho});
    rhs.push_back(std::log(v));
    wts.push_back(v / peak);
  }
  require(rows.size() >= 3, "fit_centered_psf_params: too few spectral bins above threshold");
  Eigen::MatrixXd A(rows.size(), 3);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 3; ++j) A(i, j) = wts[i] * rows[i][j];
    y[i] = wts[i] * rhs[i];
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  require(coef[2] < 0.0, "fit_centered_psf_params: spectrum is not peaked");

  const double pi = std::numbers::pi;
  AnalyticPsfParams p;
  const double a0sq = -coef[2] / (2.0 * pi * pi);
  p.a0 = std::sqrt(a0sq);
  p.k = -pi * coef[1] / (2.0 * coef[2]);
  require(p.k > 0.0, "fit_centered_psf_params: fitted wavenumber is not positive");
  // Spectral samples are discrete sums; convert to a continuous-transform scale.
  const double amp = std::exp(coef[0] + 2.0 * a0sq * p.k * p.k) * pitch * pitch;
  p.sigma_w = amp * p.k / (pi * pi * std::sqrt(2.0) * p.a0);
  return p;
}

double mainlobe_width(const Psf& psf, double level_db) {
  const RealImage mag = psf.image.data.cwiseAbs();
  Eigen::Index pr = 0, pc = 0;
  const double peak = mag.maxCoeff(&pr, &pc);
  require(peak > 0.0, "mainlobe_width: empty PSF");
  const double level = peak * std::pow(10.0, level_db / 20.0);
  const Eigen::VectorXd row = mag.row(pr).transpose();
  const Eigen::VectorXd col = mag.col(pc);
  const double wr = crossing(row, pc, level, +1) - crossing(row, pc, level, -1);
  const double wc = crossing(col, pr, level, +1) - crossing(col, pr, level, -1);
  return 0.5 * (wr + wc) * psf.image.grid.pitch();
}

double imag_to_real_ratio(const CImage& img) {
  const double re = img.real().cwiseAbs().maxCoeff();
  const double im = img.imag().cwiseAbs().maxCoeff();
  return re > 0.0 ? im / re : std::numeric_limits<double>::infinity();
}

double imag_energy_fraction(const CImage& img) {
  const double total = img.squaredNorm();
  return total > 0.0 ? img.imag().squaredNorm() / total : 0.0;
}

}  // namespace csas
