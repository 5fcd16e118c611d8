#pragma once

// Thin helpers over Eigen's FFT module. Eigen::FFT uses the convention
//   X[k] = sum_n x[n] exp(-j 2 pi k n / N),  inverse scaled by 1/N.

#include <cstddef>

#include <unsupported/Eigen/FFT>

#include "csas/core.hpp"

namespace csas::fft {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> forward(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& x) {
  Eigen::FFT<Scalar> engine;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out;
  engine.fwd(out, x);
  return out;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> inverse(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& x) {
  Eigen::FFT<Scalar> engine;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out;
  engine.inv(out, x);
  return out;
}

/// 2-D transform, rows then columns. `inverse` applies the 1/(rows*cols) scale.
template <typename Scalar>
Image<std::complex<Scalar>> transform2(const Image<std::complex<Scalar>>& in, bool inverse) {
  using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
  Eigen::FFT<Scalar> engine;
  Image<std::complex<Scalar>> out(in.rows(), in.cols());
  CVec src, dst;
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    src = in.row(r).transpose();
    if (inverse)
      engine.inv(dst, src);
    else
      engine.fwd(dst, src);
    out.row(r) = dst.transpose();
  }
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    src = out.col(c);
    if (inverse)
      engine.inv(dst, src);
    else
      engine.fwd(dst, src);
    out.col(c) = dst;
  }
  return out;
}

template <typename Scalar>
Image<std::complex<Scalar>> fft2(const Image<std::complex<Scalar>>& in) {
  return transform2(in, false);
}

template <typename Scalar>
Image<std::complex<Scalar>> ifft2(const Image<std::complex<Scalar>>& in) {
  return transform2(in, true);
}

/// Circular shift: out(r, c) = in((r - dr) mod R, (c - dc) mod C).
template <typename Derived>
Image<typename Derived::Scalar> circshift(const Eigen::MatrixBase<Derived>& in, Eigen::Index dr,
                                          Eigen::Index dc) {
  const Eigen::Index R = in.rows(), C = in.cols();
  Image<typename Derived::Scalar> out(R, C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const Eigen::Index sc = (((c - dc) % C) + C) % C;
    for (Eigen::Index r = 0; r < R; ++r) out(r, c) = in((((r - dr) % R) + R) % R, sc);
  }
  return out;
}

/// Moves pixel (rows/2, cols/2) to (0, 0).
template <typename Derived>
Image<typename Derived::Scalar> ifftshift(const Eigen::MatrixBase<Derived>& in) {
  return circshift(in, -(in.rows() / 2), -(in.cols() / 2));
}

/// Moves pixel (0, 0) to (rows/2, cols/2).
template <typename Derived>
Image<typename Derived::Scalar> fftshift(const Eigen::MatrixBase<Derived>& in) {
  return circshift(in, in.rows() / 2, in.cols() / 2);
}

/// Signed frequency index of DFT bin k for length n (bins above n/2 are negative).
inline double signed_bin(Eigen::Index k, Eigen::Index n) {
  return static_cast<double>(k <= n / 2 ? k : k - n);
}

}  // namespace csas::fft
