#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "csas/beamformer.hpp"
#include "csas/deconv.hpp"
#include "csas/inr.hpp"
#include "csas/io.hpp"
#include "csas/psf.hpp"
#include "csas/scenes.hpp"

namespace csas::app {

/// Everything the forward pipeline needs, decoded from a RunConfig.
struct Setup {
  SceneSpec scene;
  TransducerRing ring;
  Waveform waveform;
  double c = 343.0;
  double noise_db = 0.0;
  std::uint64_t noise_seed = 0;
  DasOptions das;
  double mask_fraction = 0.4;
  double floor_db = -40.0;
};

Setup make_setup(const RunConfig& cfg);

/// scene.file if set, otherwise the procedural scene.
ScatterScene make_truth(const RunConfig& cfg, const Setup& s);

/// Noise variance is relative to the peak of the noiseless pings; an empty
/// scene gets the absolute variance.
PingSet simulate_pings(const Setup& s, const ScatterScene& scene);
PingSet simulate_pings(const Setup& s, const ScatterScene& scene, double noise_db);

/// DAS image scaled to unit peak magnitude.
ComplexImage beamform(const Setup& s, const PingSet& pings, const SceneGrid& grid);

/// psf.file if set, otherwise the simulated centred PSF (unit real peak).
Psf make_psf(const RunConfig& cfg, const Setup& s, const SceneGrid& grid);

const std::vector<std::string>& method_names();
bool is_method(const std::string& name);
/// Throws ConfigError naming the valid methods.
void check_method(const std::string& name);

GdConfig gd_config(const RunConfig& cfg);
SinrConfig sinr_config(const RunConfig& cfg);

/// Runs one named method. Regularisation weights in the config are relative
/// to max|K|^2 of the PSF; BREMEN's relaxation is a fraction of its limit.
DeconvResult run_method(const std::string& method, const RunConfig& cfg, const ComplexImage& image, const Psf& psf,
                        MlpParams<float>* trained = nullptr);

/// Squared residual |A x - I|^2 split by quadrant (top-left, top-right,
/// bottom-left, bottom-right).
std::array<double, 4> quadrant_residuals(const ConvolutionOperator& op, const CImage& field, const CImage& image);

struct QuadrantReport {
  std::array<double, 4> zero{};     // residual of the zero field, i.e. the energy of I
  std::array<double, 4> complex{};  // complex-field fit
  std::array<double, 4> real{};     // real-constrained fit
  double complex_total = 0.0;
  double real_total = 0.0;
  DeconvResult complex_run;
  DeconvResult real_run;

  double ratio() const { return complex_total / real_total; }
  double complex_fraction(int q) const { return complex[q] / zero[q]; }
  double real_fraction(int q) const { return real[q] / zero[q]; }
};

/// Complex and real-constrained gradient descent on the same image.
QuadrantReport quadrant_experiment(const ComplexImage& image, const Psf& psf, GdConfig gd);

Metadata setup_metadata(const Setup& s);
Tensor scene_tensor(const ScatterScene& scene, const Setup& s);
ScatterScene scene_from_tensor(const Tensor& t);
Tensor pings_tensor(const PingSet& pings, const Setup& s);
PingSet pings_from_tensor(const Tensor& t);

}  // namespace csas::app
