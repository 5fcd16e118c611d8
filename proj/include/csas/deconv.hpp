#pragma once

#include <cstdint>
#include <vector>

#include "csas/beamformer.hpp"
#include "csas/core.hpp"
#include "csas/psf.hpp"

namespace csas {

/// Predicted complex scatterers on the scene grid.
struct ComplexField {
  CImage data;
  SceneGrid grid;
};

/// Circular convolution with a PSF whose pixel (center_row, center_col) is the
/// kernel origin, and its adjoint (correlation with the PSF).
class ConvolutionOperator {
 public:
  explicit ConvolutionOperator(const Psf& psf);
  /// Convolution with an arbitrary kernel image, origin at `center`.
  ConvolutionOperator(const CImage& kernel, Eigen::Index center_row, Eigen::Index center_col);

  CImage apply(const CImage& x) const;
  CImage adjoint(const CImage& y) const;

  const CImage& spectrum() const { return spectrum_; }
  /// max |K|^2 over frequency bins (the operator norm squared).
  double norm_squared() const { return norm_sq_; }
  Eigen::Index size() const { return spectrum_.rows(); }

 private:
  CImage spectrum_;
  double norm_sq_ = 0.0;
};

ComplexImage fft_convolve(const ComplexField& field, const Psf& psf);

/// Spectral division, bins with |K| < eps * max|K| contribute zero.
ComplexField inverse_filter(const ComplexImage& image, const Psf& psf, double eps = 1e-8);

/// conj(K) I / (|K|^2 + alpha). Bins where the denominator vanishes give zero.
ComplexField wiener(const ComplexImage& image, const Psf& psf, double alpha);

struct LossGrad {
  double loss = 0.0;
  CImage grad;
};

/// Squared l2 residual |x * psf - I|^2 and its gradient 2 A^H (A x - I), with
/// the complex gradient packing d/dRe + j d/dIm.
LossGrad datafit_grad(const ComplexField& field, const Psf& psf, const ComplexImage& image);
LossGrad datafit_grad(const CImage& x, const ConvolutionOperator& op, const CImage& image);

enum class Regularizer { None, TotalVariation, Gradient };

/// Periodic forward differences on the complex field.
/// tv:       sum sqrt(|Dx|^2 + |Dy|^2 + eps_tv^2)
/// gradient: sum |Dx|^2 + |Dy|^2
LossGrad regularizer_value_grad(const CImage& field, Regularizer kind, double eps_tv = 1e-6);

struct GdConfig {
  /// Step in units of 1/L, where L bounds the curvature of the objective
  /// (2 max|K|^2 + 16 beta).
  double learning_rate = 1.0;
  double momentum = 0.9;
  int iterations = 2000;
  Regularizer regularizer = Regularizer::None;
  double reg_weight = 0.0;
  double eps_tv = 1e-6;
  /// Initial field is init_scale * I / max|I|.
  double init_scale = 0.1;
  /// Constrain the field to real values (the phase-blind model).
  bool real_only = false;
  /// Iterations without a new best objective before the step is halved.
  int patience = 50;
  std::uint64_t seed = 0;
};

struct DeconvResult {
  ComplexField field;
  std::vector<double> loss_trace;  // data-fit value after each iteration; entry 0 is the initial value
  int iterations_run = 0;
  int best_iteration = 0;
};

/// Heavy-ball gradient descent on |x * psf - I|^2 + beta R(x). After
/// `patience` iterations without improvement the step is halved and the
/// search restarts from the best iterate. Returns the iterate with the lowest
/// objective.
/// Throws Diverged if the objective exceeds 1e6 times its initial value.
DeconvResult gd_deconvolve(const ComplexImage& image, const Psf& psf, const GdConfig& cfg);

/// Successive approximation on the real part with the real part of the PSF:
/// s <- max(0, s + relaxation (Re I - s * Re psf)), starting from zero.
/// Requires 0 < relaxation < 2 / max|K_re|.
DeconvResult bremen_deconvolve(const ComplexImage& image, const Psf& psf, double relaxation, int iterations);

/// Largest admissible relaxation for bremen_deconvolve (2 / max|K_re|).
double bremen_relaxation_limit(const Psf& psf);

}  // namespace csas
