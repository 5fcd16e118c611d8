#pragma once

#include <Eigen/Core>

#include "csas/core.hpp"

namespace csas {

/// Sampled real transmit pulse.
struct Waveform {
  Eigen::VectorXd samples;
  double fs = 0.0;  // Hz
  double f_start = 0.0;
  double f_stop = 0.0;
  double duration = 0.0;  // s

  double center_frequency() const { return 0.5 * (f_start + f_stop); }
  double bandwidth() const { return std::abs(f_stop - f_start); }
};

template <typename T>
struct TimeSeries {
  Eigen::Matrix<T, Eigen::Dynamic, 1> samples;
  double fs = 0.0;
  double t0 = 0.0;  // time of the first sample, s

  Eigen::Index size() const { return samples.size(); }
};

using RealSeries = TimeSeries<double>;
using ComplexSeries = TimeSeries<cdouble>;

/// Linear FM chirp, cos(2 pi (rate/2 t^2 + f_start t)) with rate = (f_stop - f_start)/T,
/// sampled at t = n/fs for n in [0, round(fs*T)).
Waveform lfm_chirp(double f_start, double f_stop, double duration, double fs);

/// Cross-correlation of `meas` with the transmit pulse. Output index l is the
/// lag in samples, so an echo starting at sample d peaks at index d. Output has
/// the length and time origin of `meas`.
RealSeries match_filter(const RealSeries& meas, const Waveform& w);

/// Same as above on a bare sample vector.
Eigen::VectorXd match_filter(const Eigen::Ref<const Eigen::VectorXd>& meas,
                             const Eigen::Ref<const Eigen::VectorXd>& pulse);

/// Discrete analytic signal by the one-sided spectrum method. Odd lengths are
/// zero-padded by one sample internally and truncated back.
ComplexSeries analytic_signal(const RealSeries& x);

Eigen::VectorXcd analytic_signal(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Band-limited interpolation of a complex series by an integer factor
/// (spectral zero-insertion). Sample i of the output sits at t0 + i/(factor*fs).
Eigen::VectorXcd upsample(const Eigen::Ref<const Eigen::VectorXcd>& x, int factor);

}  // namespace csas
