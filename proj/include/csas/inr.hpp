#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csas/core.hpp"
#include "csas/deconv.hpp"

namespace csas {

/// Random Fourier features: z -> [cos(2 pi kappa B z), sin(2 pi kappa B z)].
struct FourierEncoding {
  Eigen::MatrixXd b_matrix;  // M x 2, standard normal
  double kappa = 30.0;
  int features() const { return static_cast<int>(b_matrix.rows()); }
};

FourierEncoding make_fourier_encoding(int features, double kappa, std::uint64_t seed);

/// Pixel centres of an n x n grid mapped to [-1, 1]^2 as (x, y) = (column, row).
/// Row p of the result is pixel (p % n, p / n), matching column-major storage.
Eigen::MatrixXd grid_coordinates(int n);

/// coords: P x 2 -> P x 2M features (cosines first).
Eigen::MatrixXd encode(const Eigen::MatrixXd& coords, const FourierEncoding& enc);

/// Fully-connected network: hidden affine+ReLU layers followed by a linear
/// layer with two outputs (real, imaginary).
template <class Scalar>
struct MlpParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::vector<Matrix> weights;  // layer l maps width(l) -> width(l + 1)
  std::vector<Vector> biases;

  std::size_t layers() const { return weights.size(); }
  Eigen::Index input_dim() const { return weights.empty() ? 0 : weights.front().cols(); }
  std::size_t parameter_count() const;
  MlpParams zeros_like() const;
};

inline constexpr int kMlpLayers = 7;

/// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) weights, zero biases.
template <class Scalar>
MlpParams<Scalar> init_mlp(Eigen::Index input_dim, Eigen::Index hidden, std::uint64_t seed,
                           int layers = kMlpLayers);

/// Forward pass on P x 2M features; returns the n x n complex field.
template <class Scalar>
CImage mlp_forward(const MlpParams<Scalar>& params, const Eigen::MatrixXd& features, int n);

template <class Scalar>
struct SinrGradient {
  double loss = 0.0;
  MlpParams<Scalar> grads;
};

/// |INR(z) * psf - I|^2 and its gradient with respect to every parameter.
/// Throws NumericOverflow if the loss is not finite.
template <class Scalar>
SinrGradient<Scalar> sinr_loss_backward(const MlpParams<Scalar>& params, const Eigen::MatrixXd& features,
                                        const ConvolutionOperator& op, const CImage& image, int iteration = 0);

enum class Precision { Float, Double };

struct SinrConfig {
  double kappa = 30.0;
  int features = 256;
  int hidden_width = 128;
  double learning_rate = 1e-3;
  int iterations = 2000;
  std::uint64_t seed = 0;
  Precision precision = Precision::Float;
  // Adam moments.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

/// Trains the network on I (scaled to unit peak) and returns the field with
/// the lowest data-fit loss, rescaled to the units of I. The loss trace is
/// in the units of I. Throws Diverged on a non-finite or runaway loss.
/// `trained`, when given, receives the selected network.
DeconvResult sinr_deconvolve(const ComplexImage& image, const Psf& psf, const SinrConfig& cfg,
                             MlpParams<float>* trained = nullptr);

/// Trained weights plus the encoding, stored as a single TensorFile.
void save_checkpoint(const std::string& path, const MlpParams<float>& params, const FourierEncoding& enc,
                     const SinrConfig& cfg);
struct Checkpoint {
  MlpParams<float> params;
  FourierEncoding enc;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace csas
