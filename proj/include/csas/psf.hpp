#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <map>
#include <string>

#include <Eigen/Core>

#include "csas/beamformer.hpp"
#include "csas/core.hpp"
#include "csas/geometry.hpp"
#include "csas/signal.hpp"

namespace csas {

/// Simulated point spread function. The image lives on a kernel grid whose
/// pixel `center` (n/2, n/2) is the origin of the convolution model.
struct Psf {
  ComplexImage image;
  double f_start = 0.0;
  double f_stop = 0.0;
  int center_row = 0;
  int center_col = 0;
};

/// Free parameters of the centred-PSF spectrum model.
struct AnalyticPsfParams {
  double a0 = 0.0;       // spectral width
  double sigma_w = 0.0;  // amplitude
  double k = 0.0;        // wavenumber, rad/m
};

/// DAS image of a unit point scatterer at (0, 0, z0), noiseless, evaluated on
/// kernel_grid(grid).
Psf simulate_psf(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                 const DasOptions& opts = {});

/// Same pipeline with the scatterer at `position` (x, y, z). The image grid
/// is still kernel_grid(grid).
Psf simulate_offcenter_psf(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                           const Eigen::Vector3d& position, const DasOptions& opts = {});

/// Memoises simulate_psf by (ring, grid, waveform, c, options). Thread-safe.
class PsfCache {
 public:
  std::shared_ptr<const Psf> get(const TransducerRing& ring, const SceneGrid& grid, const Waveform& w, double c,
                                 const DasOptions& opts = {});
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const Psf>> entries_;
};

/// PSF scaled to unit max |Re|.
Psf normalized(const Psf& psf);

/// Centred-PSF spectrum pi^2 sqrt(2) (a0 sigma / k) exp(-2 a0^2 (k - pi rho)^2),
/// rho in cycles/m.
double centered_psf_spectrum(double rho, const AnalyticPsfParams& params);

/// Off-centre phase factor exp(j 2 pi rho R cos(theta0 - phi)). Spectra here use
/// the analysis kernel exp(+j 2 pi f.p), so this factor moves a PSF to
/// (R cos theta0, R sin theta0).
cdouble general_psf_phase(double rho, double phi, double R, double theta0);

/// Angular weighting hook g(angle); unit by default.
using AngularWeight = std::function<double(double)>;

/// Full off-centre spectrum model: centred spectrum times phase ramp times
/// g(phi + theta0 + pi/2).
cdouble general_psf_spectrum(double rho, double phi, double R, double theta0, const AnalyticPsfParams& params,
                             const AngularWeight& g = {});

/// Least-squares fit of the centred model to the radially averaged magnitude
/// spectrum of a simulated PSF (log-quadratic fit over bins above 1% of peak).
AnalyticPsfParams fit_centered_psf_params(const Psf& psf);

/// Width in metres of the main lobe at `level_db` below the peak, averaged over
/// the row and column cuts through the peak with linear sub-pixel crossings.
double mainlobe_width(const Psf& psf, double level_db = -6.0);

/// max |Im| / max |Re| over the image.
double imag_to_real_ratio(const CImage& img);

/// Fraction of sum |I|^2 carried by the imaginary part.
double imag_energy_fraction(const CImage& img);

}  // namespace csas
