#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Core>

#include "csas/core.hpp"
#include "csas/deconv.hpp"
#include "csas/inr.hpp"

namespace csas::test {

inline double rel_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double d = (a - b).norm();
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? d : d / s;
}

inline CImage random_cimage(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CImage x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = {g(rng), g(rng)};
  return x;
}

// Naive O(N^2) DFT, independent of the library's FFT.
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    cdouble acc = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) acc += x(t) * std::polar(1.0, -2.0 * M_PI * double(k * t % n) / double(n));
    out(k) = acc;
  }
  return out;
}

// Circular convolution by the defining sum, O(n^4).
inline CImage brute_convolve(const CImage& x, const Psf& psf) {
  const Eigen::Index n = x.rows();
  CImage out = CImage::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
          const Eigen::Index kr = ((r - a + psf.center_row) % n + n) % n;
          const Eigen::Index kc = ((c - b + psf.center_col) % n + n) % n;
          out(r, c) += x(a, b) * psf.image.data(kr, kc);
        }
  return out;
}

// Relative error between an analytic gradient and central differences taken
// separately along the real and imaginary part of every pixel.
template <class F>
double gradient_check(const CImage& x, const CImage& grad, F&& value, double h = 1e-5) {
  CImage fd(x.rows(), x.cols());
  CImage probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double parts[2];
    for (int k = 0; k < 2; ++k) {
      const cdouble step = k == 0 ? cdouble(h, 0) : cdouble(0, h);
      probe(i) = x(i) + step;
      const double up = value(probe);
      probe(i) = x(i) - step;
      const double down = value(probe);
      probe(i) = x(i);
      parts[k] = (up - down) / (2 * h);
    }
    fd(i) = {parts[0], parts[1]};
  }
  return rel_err(fd, grad);
}

// Every scalar parameter of the network, layer by layer, weights then biases.
inline std::vector<double*> flatten(MlpParams<double>& p) {
  std::vector<double*> out;
  for (std::size_t l = 0; l < p.layers(); ++l) {
    for (Eigen::Index i = 0; i < p.weights[l].size(); ++i) out.push_back(p.weights[l].data() + i);
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) out.push_back(p.biases[l].data() + i);
  }
  return out;
}

// Central-difference gradient of the SINR loss for every parameter.
inline Eigen::VectorXd sinr_fd_gradient(MlpParams<double> p, const Eigen::MatrixXd& feats,
                                        const ConvolutionOperator& op, const CImage& image, double h = 1e-6) {
  std::vector<double*> params = flatten(p);
  Eigen::VectorXd fd(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = *params[i];
    *params[i] = keep + h;
    const double up = sinr_loss_backward(p, feats, op, image).loss;
    *params[i] = keep - h;
    const double down = sinr_loss_backward(p, feats, op, image).loss;
    *params[i] = keep;
    fd(i) = (up - down) / (2 * h);
  }
  return fd;
}

inline Eigen::VectorXd flat_values(MlpParams<double> p) {
  const std::vector<double*> ptrs = flatten(p);
  Eigen::VectorXd v(ptrs.size());
  for (std::size_t i = 0; i < ptrs.size(); ++i) v(i) = *ptrs[i];
  return v;
}

}  // namespace csas::test
