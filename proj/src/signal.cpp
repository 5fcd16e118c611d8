#include "csas/signal.hpp"

#include <cmath>
#include <numbers>

#include "csas/fft.hpp"

namespace csas {

Waveform lfm_chirp(double f_start, double f_stop, double duration, double fs) {
  require(duration > 0.0, "lfm_chirp: duration must be positive");
  require(fs > 0.0, "lfm_chirp: sample rate must be positive");
  require(f_start >= 0.0 && f_stop >= 0.0, "lfm_chirp: frequencies must be non-negative");
  require(fs >= 2.0 * std::max(f_start, f_stop), "lfm_chirp: sample rate below Nyquist for the swept band");

  const auto n = static_cast<Eigen::Index>(std::llround(fs * duration));
  require(n >= 1, "lfm_chirp: pulse shorter than one sample");

  Waveform w;
  w.fs = fs;
  w.f_start = f_start;
  w.f_stop = f_stop;
  w.duration = duration;
  w.samples.resize(n);
  const double rate = (f_stop - f_start) / duration;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    w.samples[i] = std::cos(2.0 * std::numbers::pi * (0.5 * rate * t * t + f_start * t));
  }
  return w;
}

Eigen::VectorXd match_filter(const Eigen::Ref<const Eigen::VectorXd>& meas,
                             const Eigen::Ref<const Eigen::VectorXd>& pulse) {
  const Eigen::Index n = meas.size();
  if (n == 0) return {};
  const auto nfft = static_cast<Eigen::Index>(fft::next_pow2(n + pulse.size() - 1));

  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(nfft);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nfft);
  a.head(n) = meas.cast<cdouble>();
  b.head(pulse.size()) = pulse.cast<cdouble>();

  Eigen::FFT<double> engine;
  Eigen::VectorXcd fa, fb, corr;
  engine.fwd(fa, a);
  engine.fwd(fb, b);
  fa.array() *= fb.array().conjugate();
  engine.inv(corr, fa);
  return corr.head(n).real();
}

RealSeries match_filter(const RealSeries& meas, const Waveform& w) {
  require(meas.fs == w.fs, "match_filter: sample-rate mismatch between measurement and waveform");
  return RealSeries{match_filter(meas.samples, w.samples), meas.fs, meas.t0};
}

Eigen::VectorXcd analytic_signal(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  require(n >= 2, "analytic_signal: need at least two samples");
  const Eigen::Index m = n % 2 == 0 ? n : n + 1;

  Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(m);
  padded.head(n) = x.cast<cdouble>();

  Eigen::FFT<double> engine;
  Eigen::VectorXcd spec, out;
  engine.fwd(spec, padded);
  // Keep DC and Nyquist, double positive bins, zero negative bins.
  for (Eigen::Index k = 1; k < m / 2; ++k) spec[k] *= 2.0;
  for (Eigen::Index k = m / 2 + 1; k < m; ++k) spec[k] = 0.0;
  engine.inv(out, spec);

  Eigen::VectorXcd result = out.head(n);
  // The real part is the input by construction; restore it exactly.
  result.real() = x;
  return result;
}

ComplexSeries analytic_signal(const RealSeries& x) {
  return ComplexSeries{analytic_signal(x.samples), x.fs, x.t0};
}

Eigen::VectorXcd upsample(const Eigen::Ref<const Eigen::VectorXcd>& x, int factor) {
  require(factor >= 1, "upsample: factor must be >= 1");
  if (factor == 1) return x;
  const Eigen::Index n = x.size();
  Eigen::FFT<double> engine;
  Eigen::VectorXcd spec, out;
  engine.fwd(spec, Eigen::VectorXcd(x));

  const Eigen::Index m = n * factor;
  Eigen::VectorXcd wide = Eigen::VectorXcd::Zero(m);
  const Eigen::Index pos = n / 2 + 1;  // bins 0..n/2 go to the positive side
  wide.head(pos) = spec.head(pos);
  wide.tail(n - pos) = spec.tail(n - pos);
  engine.inv(out, wide);
  return out * static_cast<double>(factor);
}

}  // namespace csas
